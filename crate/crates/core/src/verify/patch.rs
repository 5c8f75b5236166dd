//! Static consistency check with linear fields that satisfy the interface
//! conditions exactly.

use serde::Serialize;

use super::ExactSolution;
use crate::assembly::{BoundaryConditions, Discretization, FormOptions, LoadAssembler};
use crate::fespace::{FeSpace, Field};
use crate::geometry::Point;
use crate::linalg::CsrMatrix;
use crate::materials::{ElasticParams, Materials, PoroParams};
use crate::mesh::{generate_mesh, Region, RegionRect};

/// `u_e = u_p = A x + a`, `u_f = -β u_p + w` with `w` linear and
/// divergence free, so that the pore pressure vanishes. The interface sits
/// on `x = 0` with the poro-elastic side on the left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearPatch {
    pub elastic: ElasticParams,
    pub poro: PoroParams,
    pub delta: f64,
    /// Rows `[constant, ∂x, ∂y]` of the two displacement components.
    pub displacement: [[f64; 3]; 2],
    /// Free coefficients `(∂x w_x, w_y(0), ∂x w_y)`.
    pub flow: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PatchResult {
    pub ndof: usize,
    /// `‖K Π U - F‖∞`
    pub residual: f64,
    /// `‖F‖∞`
    pub load: f64,
    pub relative: f64,
}

impl LinearPatch {
    pub fn new(delta: f64) -> Self {
        LinearPatch {
            elastic: ElasticParams { density: 1.3, lambda: 2.0, mu: 1.1, damping: 0.0 },
            poro: PoroParams {
                solid_density: 2.0,
                fluid_density: 0.9,
                porosity: 0.3,
                tortuosity: 1.7,
                viscosity: 0.4,
                permeability: 0.8,
                lambda: 2.0,
                mu: 1.1,
                biot_modulus: 1.5,
                biot_coefficient: 0.8,
                damping: 0.0,
            },
            delta,
            displacement: [[0.3, 0.7, -0.4], [-0.2, 0.5, 0.9]],
            flow: [0.6, 0.25, -0.35],
        }
    }

    fn affine(row: [f64; 3], x: Point) -> f64 {
        row[0] + row[1] * x[0] + row[2] * x[1]
    }

    /// Coefficient rows of `w`, chosen so that `(-δβ u_p + w)·n = 0` on `x = 0`.
    fn flow_rows(&self) -> [[f64; 3]; 2] {
        let db = self.delta * self.poro.biot_coefficient;
        let [a0, _, a2] = self.displacement[0];
        let [c1, d0, d1] = self.flow;
        [[db * a0, c1, db * a2], [d0, d1, -c1]]
    }

    fn rows(&self, field: Field) -> [[f64; 3]; 2] {
        match field {
            Field::Elastic | Field::Solid => self.displacement,
            Field::Filtration => {
                let b = self.poro.biot_coefficient;
                let w = self.flow_rows();
                let mut out = [[0.0; 3]; 2];
                for c in 0..2 {
                    for k in 0..3 {
                        out[c][k] = -b * self.displacement[c][k] + w[c][k];
                    }
                }
                out
            }
        }
    }

    pub fn materials(&self) -> crate::Result<Materials> {
        Ok(Materials::new(Some(self.elastic), Some(self.poro))?)
    }

    /// Static residual on a generated mesh of `(-1, 0) x (0, 1) ∪ (0, 1)²`.
    pub fn residual(&self, n_elements: usize, degree: usize, seed: u64) -> crate::Result<PatchResult> {
        let rects = [
            RegionRect::new([-1.0, 0.0], [0.0, 1.0], Region::Poro),
            RegionRect::new([0.0, 0.0], [1.0, 1.0], Region::Elastic),
        ];
        let mesh = generate_mesh(&rects, n_elements, seed)?;
        let space = FeSpace::new(mesh, degree, degree)?;
        let options = FormOptions { delta: self.delta, ..FormOptions::default() };
        let disc = Discretization::new(space, self.materials()?, BoundaryConditions::default(), options)?;
        Ok(self.residual_on(&disc))
    }

    pub fn residual_on(&self, disc: &Discretization) -> PatchResult {
        let n = disc.ndof();
        let (uncoupled, coupling) = (disc.assemble_stiffness(), disc.assemble_coupling());
        let stiffness = CsrMatrix::linear_combination(&[(1.0, &uncoupled), (1.0, &coupling)])
            .expect("stiffness and coupling share the dof numbering");
        let mut coeffs = vec![0.0; n];
        for field in Field::ALL {
            disc.space().project_into(field, |x| self.displacement(field, x, 0.0), &mut coeffs);
        }
        let mut load = vec![0.0; n];
        LoadAssembler::new(disc).add_dirichlet(|f, x| self.displacement(f, x, 0.0), &mut load);
        let mut r = stiffness.mul_vec(&coeffs);
        r.iter_mut().zip(&load).for_each(|(a, b)| *a -= b);
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (residual, load) = (inf(&r), inf(&load));
        PatchResult { ndof: n, residual, load, relative: residual / load.max(f64::MIN_POSITIVE) }
    }
}

impl ExactSolution for LinearPatch {
    fn displacement(&self, field: Field, x: Point, _t: f64) -> [f64; 2] {
        let r = self.rows(field);
        [Self::affine(r[0], x), Self::affine(r[1], x)]
    }

    fn velocity(&self, _field: Field, _x: Point, _t: f64) -> [f64; 2] {
        [0.0; 2]
    }

    fn gradient(&self, field: Field, _x: Point, _t: f64) -> [[f64; 2]; 2] {
        let r = self.rows(field);
        [[r[0][1], r[0][2]], [r[1][1], r[1][2]]]
    }
}
