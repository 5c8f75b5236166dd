use crate::fespace::FeSpace;
use crate::materials::{stiffness_norm, Materials};
use crate::mesh::{FaceClass, Region};

/// `scale · max_k (coefficient_k p_k² / h_k)` over the given sides.
pub fn penalty_value(scale: f64, sides: &[(f64, usize, f64)]) -> f64 {
    scale * sides.iter().map(|&(c, p, h)| c * (p * p) as f64 / h).fold(f64::NEG_INFINITY, f64::max)
}

/// Face-wise penalty coefficients: `alpha` for displacement jumps, `gamma`
/// for normal jumps of `beta u_p + u_f`.
#[derive(Clone, Debug)]
pub struct PenaltyField {
    pub c1: f64,
    pub c2: f64,
    /// Largest eigenvalue of the stiffness tensor per element.
    pub stiffness_bound: Vec<f64>,
    /// Biot modulus per element (0 on elastic elements).
    pub modulus_bound: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `None` on faces without a div-div term.
    pub gamma: Vec<Option<f64>>,
}

impl PenaltyField {
    pub fn new(space: &FeSpace, materials: &Materials, c1: f64, c2: f64) -> Self {
        let mesh = space.mesh();
        let (stiffness_bound, modulus_bound): (Vec<f64>, Vec<f64>) = mesh
            .elements()
            .iter()
            .map(|el| match el.region {
                Region::Elastic => {
                    let p = materials.elastic.as_ref().expect("elastic material");
                    (stiffness_norm(p.lambda, p.mu), 0.0)
                }
                Region::Poro => {
                    let p = &materials.poro.as_ref().expect("poroelastic material").params;
                    (stiffness_norm(p.lambda, p.mu), p.biot_modulus)
                }
            })
            .unzip();
        let side = |coef: &[f64], e: usize| (coef[e], space.dofs().degree(e), mesh.element(e).diameter);
        let mut alpha = Vec::with_capacity(mesh.faces().len());
        let mut gamma = Vec::with_capacity(mesh.faces().len());
        for f in mesh.faces() {
            let own = side(&stiffness_bound, f.owner);
            let a = match f.neighbor {
                Some(n) => penalty_value(c1, &[own, side(&stiffness_bound, n)]),
                None => penalty_value(c1, &[own]),
            };
            alpha.push(a);
            let g = match f.class {
                FaceClass::InteriorPoro => {
                    let n = f.neighbor.expect("interior face");
                    Some(penalty_value(c2, &[side(&modulus_bound, f.owner), side(&modulus_bound, n)]))
                }
                // the owner of an interface face is its poro-elastic element
                FaceClass::BoundaryPoro | FaceClass::Interface => Some(penalty_value(c2, &[side(&modulus_bound, f.owner)])),
                _ => None,
            };
            gamma.push(g);
        }
        PenaltyField { c1, c2, stiffness_bound, modulus_bound, alpha, gamma }
    }
}
