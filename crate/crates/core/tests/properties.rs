mod common;

use common::*;
use polydg_core::assembly::{penalty_value, BoundaryCondition, BoundaryConditions, FormOptions};
use polydg_core::fespace::quadrature::gauss_legendre;
use polydg_core::fespace::{FeSpace, Field};
use polydg_core::linalg::{kron_assemble, kron_matvec, CsrMatrix, DenseMatrix, SparseLu};
use polydg_core::materials::{derive_poro, pencil_speeds, Materials, PoroParams};
use polydg_core::mesh::{FaceClass, Region};
use polydg_core::timedg::TimeMatrices;
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn poro_params() -> impl Strategy<Value = PoroParams> {
    (
        (0.5f64..5.0, 0.1f64..2.0, 0.05f64..0.9, 1.0f64..4.0),
        (0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0, 0.5f64..10.0, 0.1f64..1.0),
    )
        .prop_map(|((solid, fluid, phi, a), (lambda, mu, m, k, beta))| PoroParams {
            solid_density: solid,
            fluid_density: fluid,
            porosity: phi,
            tortuosity: a,
            viscosity: 0.0,
            permeability: k,
            lambda,
            mu,
            biot_modulus: m,
            biot_coefficient: beta,
            damping: 0.0,
        })
}

/// `∫ x^i y^j` over a counterclockwise polygon by Green's theorem.
fn monomial_integral(poly: &[[f64; 2]], i: i32, j: i32) -> f64 {
    let (s, w) = gauss_legendre(((i + j) as usize + 4) / 2 + 1);
    let mut total = 0.0;
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        for (t, wt) in s.iter().zip(&w) {
            let u = 0.5 * (t + 1.0);
            let (x, y) = (p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]));
            total += 0.5 * wt * x.powi(i + 1) * y.powi(j) * (q[1] - p[1]) / (i + 1) as f64;
        }
    }
    total
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn face_normals_close_and_classes_partition(n in 2usize..40, seed in 0u64..1000) {
        let mesh = coupled_mesh(n, seed);
        for e in 0..mesh.n_elements() {
            let perimeter: f64 = mesh.faces().iter().filter(|f| f.owner == e || f.neighbor == Some(e)).map(|f| f.length).sum();
            let closure = mesh.normal_closure(e);
            prop_assert!(closure[0].hypot(closure[1]) <= 1e-12 * perimeter);
        }
        let classes = [
            FaceClass::InteriorElastic,
            FaceClass::InteriorPoro,
            FaceClass::Interface,
            FaceClass::BoundaryElastic,
            FaceClass::BoundaryPoro,
        ];
        let counted: usize = classes.iter().map(|&c| mesh.count_class(c)).sum();
        prop_assert_eq!(counted, mesh.faces().len());
        for f in mesh.faces() {
            prop_assert_eq!(f.class.is_boundary(), f.neighbor.is_none());
            if f.class == FaceClass::Interface {
                prop_assert_eq!(mesh.element(f.owner).region, Region::Poro);
                // the interface is x = 0.5 with the poro-elastic side on the left
                prop_assert!((f.normal[0] - 1.0).abs() < 1e-12 && f.normal[1].abs() < 1e-12);
            }
        }
        prop_assert!((mesh.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn element_quadrature_is_exact(n in 2usize..20, seed in 0u64..1000, p in 1usize..5, i in 0i32..6, j in 0i32..6) {
        prop_assume!((i + j) as usize <= 2 * p + 2);
        let space = FeSpace::new(coupled_mesh(n, seed), p, p).unwrap();
        for e in 0..space.mesh().n_elements() {
            let rule = space.element_rule(e);
            let poly = space.mesh().polygon(e);
            let exact = monomial_integral(&poly, i, j);
            let approx = rule.integrate(|x| x[0].powi(i) * x[1].powi(j));
            prop_assert!((approx - exact).abs() < 1e-13, "{approx} vs {exact}");
        }
    }

    #[test]
    fn projection_reproduces_polynomials(n in 2usize..20, seed in 0u64..1000, p in 1usize..4, c in prop::array::uniform6(-1.0f64..1.0)) {
        let space = FeSpace::new(coupled_mesh(n, seed), p, p).unwrap();
        let poly = move |x: [f64; 2]| {
            let quad = if p >= 2 { c[3] * x[0] * x[0] + c[4] * x[0] * x[1] + c[5] * x[1] * x[1] } else { 0.0 };
            [c[0] + c[1] * x[0] + c[2] * x[1] + quad, c[2] - c[0] * x[1]]
        };
        let mut coeffs = vec![0.0; space.ndof()];
        for field in Field::ALL {
            space.project_into(field, poly, &mut coeffs);
        }
        for e in 0..space.mesh().n_elements() {
            let x = space.mesh().element(e).centroid;
            for field in space.dofs().fields_on(e) {
                let v = space.evaluate(&coeffs, field, e, x).value;
                let exact = poly(x);
                prop_assert!((v[0] - exact[0]).abs() < 1e-11 && (v[1] - exact[1]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn pencil_matches_brute_force(params in poro_params()) {
        let Ok(d) = derive_poro(&params) else { return Ok(()) };
        let (m, beta, rf) = (params.biot_modulus, params.biot_coefficient, params.fluid_density);
        let rho = [[d.bulk_density, rf], [rf, d.apparent_fluid_density]];
        let k = [[params.lambda + 2.0 * params.mu + m * beta * beta, m * beta], [m * beta, m]];
        let (fast, slow) = brute_force_speeds(rho, k);
        prop_assert!((d.fast_p_speed - fast).abs() <= 1e-12 * fast);
        prop_assert!((d.slow_p_speed - slow).abs() <= 1e-12 * fast);
        prop_assert!(d.fast_p_speed >= d.slow_p_speed && d.slow_p_speed > 0.0);
        let (hi, lo) = pencil_speeds(rho, k).unwrap();
        prop_assert_eq!((hi, lo), (d.fast_p_speed, d.slow_p_speed));
    }

    #[test]
    fn densities_scale_speeds(params in poro_params(), s in 0.1f64..10.0) {
        let Ok(a) = derive_poro(&params) else { return Ok(()) };
        let scaled = PoroParams { solid_density: s * params.solid_density, fluid_density: s * params.fluid_density, ..params };
        let b = derive_poro(&scaled).unwrap();
        prop_assert!((b.bulk_density - s * a.bulk_density).abs() <= 1e-12 * b.bulk_density);
        prop_assert!((b.apparent_fluid_density - s * a.apparent_fluid_density).abs() <= 1e-12 * b.apparent_fluid_density);
        prop_assert!((b.norm_density - s * a.norm_density).abs() <= 1e-12 * b.norm_density);
        for (x, y) in [(a.fast_p_speed, b.fast_p_speed), (a.slow_p_speed, b.slow_p_speed), (a.shear_speed, b.shear_speed)] {
            prop_assert!((y * y * s - x * x).abs() <= 1e-11 * x * x);
        }
    }

    #[test]
    fn penalties_are_inverse_in_h(c in 0.1f64..100.0, sides in prop::collection::vec((0.1f64..10.0, 1usize..8, 0.01f64..2.0), 1..3)) {
        let a = penalty_value(c, &sides);
        let halved: Vec<_> = sides.iter().map(|&(k, p, h)| (k, p, 0.5 * h)).collect();
        prop_assert!(a > 0.0);
        prop_assert_eq!(penalty_value(c, &halved), 2.0 * a);
    }

    #[test]
    fn kron_matches_vector_identity(r in 1usize..4, n in 1usize..6, seed in 0u64..1000) {
        let time = TimeMatrices::build(r, 0.1).unwrap();
        let q = DenseMatrix::from_rows(&(0..n).map(|i| random_vector(n, seed + i as u64)).collect::<Vec<_>>());
        let q = CsrMatrix::from_dense(&q);
        let (u, v) = (random_vector(r + 1, seed + 100), random_vector(n, seed + 200));
        let uv: Vec<f64> = u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        let (pu, qv) = (time.n4.matvec(&u), q.mul_vec(&v));
        let expected: Vec<f64> = pu.iter().flat_map(|a| qv.iter().map(move |b| a * b)).collect();
        let terms = [(&time.n4, &q)];
        let direct = kron_matvec(&terms, &uv).unwrap();
        let assembled = kron_assemble(&terms).unwrap().mul_vec(&uv);
        for ((x, y), z) in direct.iter().zip(&assembled).zip(&expected) {
            prop_assert!((x - z).abs() < 1e-13 && (y - z).abs() < 1e-13);
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn assembled_operator_is_symmetric(n in 2usize..24, seed in 0u64..1000, p in 1usize..4, delta in 0.0f64..=1.0, absorbing: bool) {
        let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
        let boundary = if absorbing {
            BoundaryConditions { top: BoundaryCondition::FreeSurface, ..BoundaryConditions::uniform(BoundaryCondition::Absorbing) }
        } else {
            BoundaryConditions::default()
        };
        let disc = discretize(coupled_mesh(n, seed), p, materials, boundary, FormOptions { delta, ..FormOptions::default() });
        let system = disc.assemble().unwrap();
        for m in [&system.mass, &system.damping, &system.stiffness] {
            prop_assert!(m.symmetry_defect() <= 1e-12 * m.max_abs().max(f64::MIN_POSITIVE));
        }
        let (u, w) = (random_vector(disc.ndof(), seed), random_vector(disc.ndof(), seed + 1));
        let c = &system.coupling;
        let (uw, wu) = (c.bilinear(&u, &w), c.bilinear(&w, &u));
        prop_assert!((uw - wu).abs() <= 1e-12 * uw.abs().max(1.0));
    }

    #[test]
    fn cached_factorization_matches_fresh(n in 2usize..16, seed in 0u64..1000) {
        let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
        let disc = discretize(coupled_mesh(n, seed), 2, materials, BoundaryConditions::default(), FormOptions::default());
        let system = disc.assemble().unwrap();
        let a = CsrMatrix::linear_combination(&[(1.0, &system.mass), (0.01, &system.stiffness)]).unwrap();
        let lu = SparseLu::new(&a).unwrap();
        for k in 0..3 {
            let b = random_vector(a.nrows(), seed + k);
            let cached = lu.solve(&b);
            let fresh = SparseLu::new(&a).unwrap().solve(&b);
            let scale = cached.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (x, y) in cached.iter().zip(&fresh) {
                prop_assert!((x - y).abs() <= 1e-13 * scale);
            }
        }
    }
}
