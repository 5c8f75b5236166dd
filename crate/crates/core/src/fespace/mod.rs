//! Discontinuous polynomial spaces on the polygonal mesh.

mod basis;
mod dofmap;
pub mod quadrature;

use thiserror::Error;

pub use basis::{scalar_dim, ScaledLegendre, Tabulation};
pub use dofmap::{DofMap, Field};
pub use quadrature::QuadratureRule;

use crate::geometry::Point;
use crate::linalg::dense::DenseMatrix;
use crate::mesh::PolyMesh;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("element {element} has polynomial degree 0; degrees must be at least 1")]
    ZeroDegree { element: usize },
    #[error("expected {expected} element degrees, found {found}")]
    DegreeCount { expected: usize, found: usize },
}

/// Value and gradient (`grad[c][k] = d u_c / d x_k`) of a vector field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointValue {
    pub value: [f64; 2],
    pub grad: [[f64; 2]; 2],
}

/// Mesh, dof numbering, bases and quadrature.
#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: PolyMesh,
    dofs: DofMap,
    bases: Vec<ScaledLegendre>,
    rules: Vec<QuadratureRule>,
}

pub fn build_space(mesh: PolyMesh, degree_elastic: usize, degree_poro: usize) -> Result<FeSpace, SpaceError> {
    FeSpace::new(mesh, degree_elastic, degree_poro)
}

impl FeSpace {
    pub fn new(mesh: PolyMesh, degree_elastic: usize, degree_poro: usize) -> Result<Self, SpaceError> {
        let dofs = DofMap::uniform(&mesh, degree_elastic, degree_poro)?;
        Ok(Self::from_dofs(mesh, dofs))
    }

    pub fn with_degrees(mesh: PolyMesh, degrees: Vec<usize>) -> Result<Self, SpaceError> {
        let dofs = DofMap::new(&mesh, degrees)?;
        Ok(Self::from_dofs(mesh, dofs))
    }

    fn from_dofs(mesh: PolyMesh, dofs: DofMap) -> Self {
        let bases = (0..mesh.n_elements())
            .map(|e| ScaledLegendre::new(dofs.degree(e), &mesh.element(e).bbox))
            .collect();
        let rules = (0..mesh.n_elements())
            .map(|e| QuadratureRule::polygon(mesh.subtriangulation(e), 2 * dofs.degree(e) + 2))
            .collect();
        FeSpace { mesh, dofs, bases, rules }
    }

    pub fn mesh(&self) -> &PolyMesh {
        &self.mesh
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn ndof(&self) -> usize {
        self.dofs.ndof()
    }

    pub fn basis(&self, element: usize) -> &ScaledLegendre {
        &self.bases[element]
    }

    /// Element rule exact to degree 2p + 2.
    pub fn element_rule(&self, element: usize) -> &QuadratureRule {
        &self.rules[element]
    }

    pub fn element_rule_of_degree(&self, element: usize, degree: usize) -> QuadratureRule {
        QuadratureRule::polygon(self.mesh.subtriangulation(element), degree)
    }

    /// Gauss rule with p + 2 points, p the largest degree next to the face.
    pub fn face_rule(&self, face: usize) -> QuadratureRule {
        let f = self.mesh.face(face);
        let mut p = self.dofs.degree(f.owner);
        if let Some(n) = f.neighbor {
            p = p.max(self.dofs.degree(n));
        }
        self.face_rule_with_points(face, p + 2)
    }

    pub fn face_rule_with_points(&self, face: usize, n: usize) -> QuadratureRule {
        let [a, b] = self.mesh.face_points(face);
        QuadratureRule::segment(a, b, n)
    }

    /// Value and gradient of `field` at `x`, using the polynomial of `element`.
    pub fn evaluate(&self, coeffs: &[f64], field: Field, element: usize, x: Point) -> PointValue {
        let Some(off) = self.dofs.offset(field, element) else {
            return PointValue::default();
        };
        let basis = &self.bases[element];
        let nb = basis.len();
        let mut v = vec![0.0; nb];
        let mut g = vec![[0.0; 2]; nb];
        basis.eval(x, &mut v, &mut g);
        combine(&coeffs[off..off + 2 * nb], &v, &g)
    }

    /// Element-wise L2 projection of `f` onto the space of `field`; entries of
    /// other fields are zero.
    pub fn project(&self, field: Field, f: impl Fn(Point) -> [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.ndof()];
        self.project_into(field, f, &mut out);
        out
    }

    pub fn project_into(&self, field: Field, f: impl Fn(Point) -> [f64; 2], out: &mut [f64]) {
        for e in 0..self.mesh.n_elements() {
            let Some(off) = self.dofs.offset(field, e) else { continue };
            let nb = self.bases[e].len();
            let rule = self.element_rule_of_degree(e, 2 * self.dofs.degree(e) + 4);
            let tab = Tabulation::new(&self.bases[e], &rule.points);
            let mut mass = DenseMatrix::zeros(nb, nb);
            let mut rhs = vec![0.0; 2 * nb];
            for (q, (&x, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
                let val = f(x);
                let phi = tab.values_at(q);
                for i in 0..nb {
                    for j in 0..nb {
                        mass[(i, j)] += w * phi[i] * phi[j];
                    }
                    rhs[i] += w * val[0] * phi[i];
                    rhs[nb + i] += w * val[1] * phi[i];
                }
            }
            let chol = mass.cholesky().expect("element mass matrix is positive definite");
            let (bx, by) = rhs.split_at_mut(nb);
            chol.solve_in_place(bx);
            chol.solve_in_place(by);
            out[off..off + 2 * nb].copy_from_slice(&rhs);
        }
    }
}

/// Vector value and gradient from a local coefficient block `[c0 | c1]`.
pub fn combine(block: &[f64], values: &[f64], grads: &[[f64; 2]]) -> PointValue {
    let nb = values.len();
    let mut out = PointValue::default();
    for i in 0..nb {
        for c in 0..2 {
            let a = block[c * nb + i];
            out.value[c] += a * values[i];
            out.grad[c][0] += a * grads[i][0];
            out.grad[c][1] += a * grads[i][1];
        }
    }
    out
}
