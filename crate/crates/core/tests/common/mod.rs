#![allow(dead_code)]

use faer::Mat;
use polydg_core::assembly::{BoundaryConditions, Discretization, FormOptions};
use polydg_core::fespace::FeSpace;
use polydg_core::linalg::CsrMatrix;
use polydg_core::materials::{ElasticParams, Materials, PoroParams};
use polydg_core::mesh::{generate_mesh, PolyMesh, Region, RegionRect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Extreme eigenvalues of the symmetric part of `a`, by dense
/// eigendecomposition.
pub fn eigen_range(a: &CsrMatrix) -> (f64, f64) {
    let d = a.to_dense();
    let n = d.nrows();
    let m = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (d[(i, j)] + d[(j, i)]));
    let eig = m.self_adjoint_eigen(faer::Side::Lower).expect("symmetric eigensolver");
    let s = eig.S().column_vector();
    (s[0], s[n - 1])
}

/// Largest absolute eigenvalue, used as the operator norm.
pub fn spectral_norm(a: &CsrMatrix) -> f64 {
    let (lo, hi) = eigen_range(a);
    lo.abs().max(hi.abs())
}

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn elastic() -> ElasticParams {
    ElasticParams { density: 1.2, lambda: 2.0, mu: 1.0, damping: 0.0 }
}

pub fn poro() -> PoroParams {
    PoroParams {
        solid_density: 2.0,
        fluid_density: 0.9,
        porosity: 0.35,
        tortuosity: 1.6,
        viscosity: 0.3,
        permeability: 0.7,
        lambda: 1.5,
        mu: 0.8,
        biot_modulus: 2.5,
        biot_coefficient: 0.7,
        damping: 0.0,
    }
}

/// `[0,1]²` split on `x = 0.5`, poro-elastic on the left.
pub fn coupled_mesh(n_elements: usize, seed: u64) -> PolyMesh {
    let rects = [
        RegionRect::new([0.0, 0.0], [0.5, 1.0], Region::Poro),
        RegionRect::new([0.5, 0.0], [1.0, 1.0], Region::Elastic),
    ];
    generate_mesh(&rects, n_elements, seed).expect("mesh")
}

/// Two unit squares side by side.
pub fn two_squares(left: Region, right: Region) -> PolyMesh {
    let vertices = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]];
    PolyMesh::from_polygons(vertices, vec![(left, vec![0, 1, 4, 3]), (right, vec![1, 2, 5, 4])]).expect("mesh")
}

pub fn unit_square(region: Region) -> PolyMesh {
    PolyMesh::from_polygons(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], vec![(region, vec![0, 1, 2, 3])])
        .expect("mesh")
}

pub fn discretize(
    mesh: PolyMesh,
    degree: usize,
    materials: Materials,
    boundary: BoundaryConditions,
    options: FormOptions,
) -> Discretization {
    let space = FeSpace::new(mesh, degree, degree).expect("space");
    Discretization::new(space, materials, boundary, options).expect("discretization")
}

/// Roots of `det(K - L ρ) = 0` as speeds, largest first.
pub fn brute_force_speeds(rho: [[f64; 2]; 2], k: [[f64; 2]; 2]) -> (f64, f64) {
    let a = rho[0][0] * rho[1][1] - rho[0][1] * rho[0][1];
    let b = -(k[0][0] * rho[1][1] + k[1][1] * rho[0][0] - 2.0 * k[0][1] * rho[0][1]);
    let c = k[0][0] * k[1][1] - k[0][1] * k[0][1];
    let q = -0.5 * (b - (b * b - 4.0 * a * c).max(0.0).sqrt());
    let (high, low) = (q / a, c / q);
    (high.sqrt(), low.sqrt())
}

/// Published Lobatto IIIC Butcher matrices.
pub fn lobatto_iiic(stages: usize) -> Vec<Vec<f64>> {
    let r5 = 5f64.sqrt();
    match stages {
        2 => vec![vec![0.5, -0.5], vec![0.5, 0.5]],
        3 => vec![
            vec![1.0 / 6.0, -1.0 / 3.0, 1.0 / 6.0],
            vec![1.0 / 6.0, 5.0 / 12.0, -1.0 / 12.0],
            vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0],
        ],
        4 => vec![
            vec![1.0 / 12.0, -r5 / 12.0, r5 / 12.0, -1.0 / 12.0],
            vec![1.0 / 12.0, 0.25, (10.0 - 7.0 * r5) / 60.0, r5 / 60.0],
            vec![1.0 / 12.0, (10.0 + 7.0 * r5) / 60.0, 0.25, -r5 / 60.0],
            vec![1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0],
        ],
        _ => unreachable!(),
    }
}
