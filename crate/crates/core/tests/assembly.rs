mod common;

use common::*;
use polydg_core::assembly::{
    ricker, AssemblyError, BlockSystem, BoundaryCondition, BoundaryConditions, Discretization, FormOptions,
    LoadAssembler, MomentSource,
};
use polydg_core::fespace::{FeSpace, Field};
use polydg_core::materials::{ElasticParams, Materials};
use polydg_core::mesh::{FaceClass, PolyMesh, Region};

fn free() -> BoundaryConditions {
    BoundaryConditions::uniform(BoundaryCondition::FreeSurface)
}

fn elastic_only(params: ElasticParams) -> Materials {
    Materials::new(Some(params), None).unwrap()
}

fn project(disc: &Discretization, field: Field, f: impl Fn([f64; 2]) -> [f64; 2] + Sync) -> Vec<f64> {
    let mut coeffs = vec![0.0; disc.ndof()];
    disc.space().project_into(field, f, &mut coeffs);
    coeffs
}

#[test]
fn unit_square_mass_is_identity() {
    let params = ElasticParams { density: 1.0, ..elastic() };
    let disc = discretize(unit_square(Region::Elastic), 1, elastic_only(params), free(), FormOptions::default());
    let mass = disc.assemble_mass().to_dense();
    assert_eq!(mass.nrows(), 6);
    for i in 0..6 {
        for j in 0..6 {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((mass[(i, j)] - expected).abs() < 1e-12, "({i},{j}) = {}", mass[(i, j)]);
        }
    }
}

#[test]
fn fluid_density_scales_the_cross_mass() {
    let mut singular = poro();
    singular.fluid_density = 0.0;
    let err = Materials::new(Some(elastic()), Some(singular)).unwrap_err();
    assert!(err.to_string().contains("fluid_density"), "{err}");
    let cross = |rho_f: f64| {
        let mut p = poro();
        p.fluid_density = rho_f;
        let disc = discretize(coupled_mesh(6, 1), 2, Materials::new(Some(elastic()), Some(p)).unwrap(), free(), FormOptions::default());
        BlockSystem::field_block(disc.space(), &disc.assemble_mass(), Field::Solid, Field::Filtration).max_abs()
    };
    let (small, large) = (cross(1e-3), cross(1e-1));
    assert!((large / small - 100.0).abs() < 1e-9);
}

#[test]
fn mass_is_positive_definite() {
    let disc = discretize(coupled_mesh(4, 3), 2, Materials::new(Some(elastic()), Some(poro())).unwrap(), free(), FormOptions::default());
    let mass = disc.assemble_mass();
    assert!(mass.symmetry_defect() <= 1e-14 * mass.max_abs());
    let (lo, _) = eigen_range(&mass);
    assert!(lo > 1e-3, "smallest eigenvalue {lo}");
}

#[test]
fn viscous_damping_is_twice_the_mass() {
    let params = ElasticParams { density: 1.0, damping: 1.0, ..elastic() };
    let disc = discretize(unit_square(Region::Elastic), 2, elastic_only(params), BoundaryConditions::default(), FormOptions::default());
    let (mass, damping) = (disc.assemble_mass(), disc.assemble_damping());
    for i in 0..mass.nrows() {
        for j in 0..mass.ncols() {
            assert!((damping.get(i, j) - 2.0 * mass.get(i, j)).abs() < 1e-13);
        }
    }
}

#[test]
fn no_drag_means_no_filtration_damping() {
    let mut poro = poro();
    poro.viscosity = 0.0;
    let disc = discretize(coupled_mesh(6, 2), 2, Materials::new(Some(elastic()), Some(poro)).unwrap(), free(), FormOptions::default());
    let damping = disc.assemble_damping();
    assert_eq!(damping.max_abs(), 0.0);
}

#[test]
fn absorbing_face_under_normal_incidence() {
    let params = elastic();
    let boundary = BoundaryConditions { right: BoundaryCondition::Absorbing, ..free() };
    let disc = discretize(unit_square(Region::Elastic), 2, elastic_only(params), boundary, FormOptions::default());
    let damping = disc.assemble_damping();
    let speed = 1.7;
    let v = project(&disc, Field::Elastic, |_| [speed, 0.0]);
    let cp = ((params.lambda + 2.0 * params.mu) / params.density).sqrt();
    let expected = params.density * cp * 1.0 * speed * speed;
    assert!((damping.bilinear(&v, &v) - expected).abs() < 1e-10 * expected);
    // tangential motion sees the shear impedance instead
    let w = project(&disc, Field::Elastic, |_| [0.0, speed]);
    let cs = (params.mu / params.density).sqrt();
    assert!((damping.bilinear(&w, &w) - params.density * cs * speed * speed).abs() < 1e-10);
}

#[test]
fn damping_is_positive_semidefinite_with_absorbing_faces() {
    let mut poro = poro();
    poro.damping = 0.2;
    let materials = Materials::new(Some(ElasticParams { damping: 0.1, ..elastic() }), Some(poro)).unwrap();
    let boundary = BoundaryConditions::uniform(BoundaryCondition::Absorbing);
    let disc = discretize(coupled_mesh(8, 5), 2, materials, boundary, FormOptions::default());
    let damping = disc.assemble_damping();
    assert!(damping.symmetry_defect() <= 1e-14 * damping.max_abs());
    let (lo, hi) = eigen_range(&damping);
    assert!(lo >= -1e-12 * hi, "smallest eigenvalue {lo}");
}

#[test]
fn rigid_translation_has_no_elastic_energy() {
    let mesh = polydg_core::mesh::generate_mesh(
        &[polydg_core::mesh::RegionRect::new([0.0, 0.0], [1.0, 1.0], Region::Elastic)],
        12,
        7,
    )
    .unwrap();
    let disc = discretize(mesh, 2, elastic_only(elastic()), free(), FormOptions::default());
    let stiffness = disc.assemble_stiffness();
    let u = project(&disc, Field::Elastic, |_| [0.4, -1.3]);
    let r = stiffness.mul_vec(&u);
    assert!(r.iter().all(|v| v.abs() < 1e-11 * stiffness.max_abs()));
}

#[test]
fn dilatation_energy_matches_hand_integral() {
    let params = elastic();
    let disc = discretize(unit_square(Region::Elastic), 1, elastic_only(params), free(), FormOptions::default());
    let stiffness = disc.assemble_stiffness();
    let u = project(&disc, Field::Elastic, |x| x);
    // ε = I, σ = 2μ I + 2λ I, σ:ε = 4μ + 4λ on a unit area
    let expected = 4.0 * params.mu + 4.0 * params.lambda;
    assert!((stiffness.bilinear(&u, &u) - expected).abs() < 1e-12 * expected);
}

#[test]
fn divergence_form_on_one_element() {
    let materials = Materials::new(None, Some(poro())).unwrap();
    let p = poro();
    let disc = discretize(unit_square(Region::Poro), 1, materials, free(), FormOptions::default());
    let stiffness = disc.assemble_stiffness();
    // u_p = (x, 0): div u_p = 1, ε(u_p) : σ(u_p) = 2μ + λ
    let u = project(&disc, Field::Solid, |x| [x[0], 0.0]);
    let skeleton = 2.0 * p.mu + p.lambda;
    let expected = p.biot_modulus * p.biot_coefficient.powi(2);
    assert!((stiffness.bilinear(&u, &u) - skeleton - expected).abs() < 1e-12);
    // u_f alone only sees the div-div term
    let w = project(&disc, Field::Filtration, |x| [0.0, x[1]]);
    assert!((stiffness.bilinear(&w, &w) - p.biot_modulus).abs() < 1e-12);
}

#[test]
fn no_interface_means_no_coupling() {
    for region in [Region::Elastic, Region::Poro] {
        let mesh = two_squares(region, region);
        assert_eq!(mesh.count_class(FaceClass::Interface), 0);
        let disc = discretize(mesh, 2, Materials::new(Some(elastic()), Some(poro())).unwrap(), BoundaryConditions::default(), FormOptions::default());
        assert_eq!(disc.assemble_coupling().max_abs(), 0.0);
    }
}

#[test]
fn interface_is_the_only_link_between_regions() {
    let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
    let disc = discretize(coupled_mesh(10, 4), 2, materials, BoundaryConditions::default(), FormOptions::default());
    let system = disc.assemble().unwrap();
    let space = disc.space();
    for matrix in [&system.mass, &system.damping] {
        for f in [Field::Solid, Field::Filtration] {
            assert_eq!(BlockSystem::field_block(space, matrix, Field::Elastic, f).max_abs(), 0.0);
        }
    }
    assert!(BlockSystem::field_block(space, &system.stiffness, Field::Elastic, Field::Solid).max_abs() > 0.0);
    assert_eq!(BlockSystem::field_block(space, &system.stiffness, Field::Elastic, Field::Filtration).max_abs(), 0.0);
    let uncoupled = disc.assemble_stiffness();
    for f in [Field::Solid, Field::Filtration] {
        assert_eq!(BlockSystem::field_block(space, &uncoupled, Field::Elastic, f).max_abs(), 0.0);
    }
}

#[test]
fn coupling_is_symmetric_for_every_delta() {
    for delta in [0.0, 0.5, 1.0] {
        let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
        let options = FormOptions { delta, ..FormOptions::default() };
        let disc = discretize(two_squares(Region::Poro, Region::Elastic), 3, materials, BoundaryConditions::default(), options);
        let coupling = disc.assemble_coupling();
        assert!(coupling.max_abs() > 0.0);
        let (u, w) = (random_vector(disc.ndof(), 1), random_vector(disc.ndof(), 2));
        let (uw, wu) = (coupling.bilinear(&u, &w), coupling.bilinear(&w, &u));
        assert!((uw - wu).abs() <= 1e-12 * uw.abs().max(1.0), "delta {delta}: {uw} vs {wu}");
    }
}

#[test]
fn full_operator_is_coercive() {
    for (n, seed, delta) in [(8, 1, 0.0), (20, 2, 0.5), (30, 3, 1.0)] {
        let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
        let options = FormOptions { delta, ..FormOptions::default() };
        let disc = discretize(coupled_mesh(n, seed), 2, materials, BoundaryConditions::default(), options);
        let stiffness = disc.assemble().unwrap().stiffness;
        assert!(stiffness.symmetry_defect() <= 1e-12 * stiffness.max_abs());
        let (lo, hi) = eigen_range(&stiffness);
        assert!(lo >= -1e-10 * hi, "n {n}, delta {delta}: smallest eigenvalue {lo}");
    }
}

#[test]
fn invalid_delta_is_rejected() {
    let space = FeSpace::new(two_squares(Region::Poro, Region::Elastic), 1, 1).unwrap();
    let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
    let options = FormOptions { delta: 1.5, ..FormOptions::default() };
    let err = Discretization::new(space, materials, BoundaryConditions::default(), options).unwrap_err();
    assert!(matches!(err, AssemblyError::InvalidDelta(d) if d == 1.5));
}

#[test]
fn penalties_double_when_the_mesh_halves() {
    let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
    let mesh = coupled_mesh(12, 9);
    let half = PolyMesh::from_polygons(
        mesh.vertices().iter().map(|v| [0.5 * v[0], 0.5 * v[1]]).collect(),
        mesh.elements().iter().map(|e| (e.region, e.vertices.clone())).collect(),
    )
    .unwrap();
    let a = discretize(mesh, 2, materials, BoundaryConditions::default(), FormOptions::default());
    let b = discretize(half, 2, materials, BoundaryConditions::default(), FormOptions::default());
    let (pa, pb) = (a.penalties(), b.penalties());
    for f in 0..pa.alpha.len() {
        assert!(pa.alpha[f] > 0.0);
        assert_eq!(pb.alpha[f], 2.0 * pa.alpha[f]);
        match (pa.gamma[f], pb.gamma[f]) {
            (Some(ga), Some(gb)) => {
                assert!(ga > 0.0);
                assert_eq!(gb, 2.0 * ga);
            }
            (None, None) => {}
            _ => panic!("gamma defined on only one of the meshes"),
        }
    }
}

#[test]
fn ricker_values() {
    for f in [1.0, 5.0, 12.0] {
        assert_eq!(ricker(0.3, f, 0.3), 1.0);
    }
    let b = (std::f64::consts::PI * 5.0).powi(2);
    assert!((b - 246.740).abs() < 1e-3);
    assert!((ricker(0.4, 5.0, 0.3) + 0.3337).abs() < 1e-4);
}

#[test]
fn constant_body_force_only_loads_the_mean_mode() {
    let disc = discretize(unit_square(Region::Elastic), 3, elastic_only(elastic()), free(), FormOptions::default());
    let mut load = vec![0.0; disc.ndof()];
    LoadAssembler::new(&disc).add_body(|_, _| [1.0, 0.0], &mut load);
    let nb = disc.space().dofs().n_modes(0);
    // orthonormal constant mode is 1 on the unit square
    assert!((load[0] - 1.0).abs() < 1e-13);
    assert!(load.iter().enumerate().filter(|&(i, _)| i != 0).all(|(_, v)| v.abs() < 1e-13));
    assert_eq!(load.len(), 2 * nb);
}

#[test]
fn moment_source_placement_is_validated() {
    let materials = Materials::new(Some(elastic()), Some(poro())).unwrap();
    let disc = discretize(two_squares(Region::Poro, Region::Elastic), 2, materials, free(), FormOptions::default());
    let source = |x: [f64; 2], region| MomentSource { position: x, moment: 1.0, peak_frequency: 5.0, delay: 0.3, region };
    assert!(matches!(source([3.0, 0.5], None).load_vector(&disc), Err(AssemblyError::SourceOutsideMesh(_))));
    assert!(matches!(source([1.0, 0.5], None).load_vector(&disc), Err(AssemblyError::SourceOnElementBoundary { .. })));
    assert!(matches!(
        source([1.5, 0.5], Some(Region::Poro)).load_vector(&disc),
        Err(AssemblyError::SourceRegion { .. })
    ));
    let load = source([0.3, 0.6], Some(Region::Poro)).load_vector(&disc).unwrap();
    let space = disc.space();
    // the same divergence functional on both poro-elastic fields, nothing elastic
    let (solid, filtration) = (space.dofs().block(Field::Solid, 0).unwrap(), space.dofs().block(Field::Filtration, 0).unwrap());
    assert_eq!(load[solid.clone()], load[filtration]);
    assert!(load[solid].iter().any(|v| v.abs() > 0.1));
    assert!(load[space.dofs().block(Field::Elastic, 1).unwrap()].iter().all(|&v| v == 0.0));
}
