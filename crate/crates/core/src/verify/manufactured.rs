//! Closed-form fields on the coupled square `(-1, 0) x (0, 1) ∪ (0, 1)²` and
//! the loads that make them exact.

use std::f64::consts::PI;

use super::ExactSolution;
use crate::assembly::{BoundaryConditions, Discretization, Forcing, FormOptions, LoadAssembler};
use crate::fespace::{FeSpace, Field};
use crate::geometry::Point;
use crate::materials::{ElasticParams, Materials, PoroParams};
use crate::mesh::{generate_mesh, PolyMesh, Region, RegionRect};
use crate::timedg::State;

/// `x² sin(kπx)`.
fn squared_sine(k: f64, x: f64) -> [f64; 3] {
    let w = k * PI;
    let (s, c) = (w * x).sin_cos();
    [x * x * s, 2.0 * x * s + w * x * x * c, 2.0 * s + 4.0 * w * x * c - w * w * x * x * s]
}

/// `x² cos(πx/2) sin(πx)`.
fn poro_profile(x: f64) -> [f64; 3] {
    let (sh, ch) = (0.5 * PI * x).sin_cos();
    let (s, c) = (PI * x).sin_cos();
    let q = ch * s;
    let dq = -0.5 * PI * sh * s + PI * ch * c;
    let ddq = -1.25 * PI * PI * ch * s - PI * PI * sh * c;
    [x * x * q, 2.0 * x * q + x * x * dq, 2.0 * q + 4.0 * x * dq + x * x * ddq]
}

/// `cos(ωt)` with its first two derivatives.
fn cosine(omega: f64, t: f64) -> [f64; 3] {
    let (s, c) = (omega * t).sin_cos();
    [c, -omega * s, -omega * omega * c]
}

/// Spatial profiles `[U_x, U_y]` with first and second x-derivatives; every
/// field depends on x only.
#[derive(Clone, Copy, Debug)]
struct Profile {
    x: [f64; 3],
    y: [f64; 3],
}

/// Product fields `u_e = cos(4πt) [x² sin 2πx, x² sin 4πx]`,
/// `u_p = cos(√2 πt) x² cos(πx/2) sin(πx) [1, 1]` and `u_f = -u_p`, with the
/// loads obtained by applying the strong operators to them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub elastic: ElasticParams,
    pub poro: PoroParams,
    pub delta: f64,
    /// `u_f = filtration_ratio · u_p`.
    pub filtration_ratio: f64,
}

impl Default for ManufacturedCase {
    fn default() -> Self {
        Self::new()
    }
}

impl ManufacturedCase {
    /// Unit coefficients except the elastic `λ = 2`, porosity 1/2 and δ = 1.
    pub fn new() -> Self {
        ManufacturedCase {
            elastic: ElasticParams { density: 1.0, lambda: 2.0, mu: 1.0, damping: 1.0 },
            poro: PoroParams {
                solid_density: 1.0,
                fluid_density: 1.0,
                porosity: 0.5,
                tortuosity: 1.0,
                viscosity: 1.0,
                permeability: 1.0,
                lambda: 1.0,
                mu: 1.0,
                biot_modulus: 1.0,
                biot_coefficient: 1.0,
                damping: 1.0,
            },
            delta: 1.0,
            filtration_ratio: -1.0,
        }
    }

    pub fn regions() -> [RegionRect; 2] {
        [
            RegionRect::new([-1.0, 0.0], [0.0, 1.0], Region::Poro),
            RegionRect::new([0.0, 0.0], [1.0, 1.0], Region::Elastic),
        ]
    }

    pub fn materials(&self) -> crate::Result<Materials> {
        Ok(Materials::new(Some(self.elastic), Some(self.poro))?)
    }

    pub fn mesh(n_elements: usize, seed: u64) -> crate::Result<PolyMesh> {
        Ok(generate_mesh(&Self::regions(), n_elements, seed)?)
    }

    /// Discretization with Dirichlet data on the whole outer boundary.
    pub fn discretization(&self, mesh: PolyMesh, degree: usize, c1: f64, c2: f64) -> crate::Result<Discretization> {
        let space = FeSpace::new(mesh, degree, degree)?;
        let options = FormOptions { c1, c2, delta: self.delta };
        Ok(Discretization::new(space, self.materials()?, BoundaryConditions::default(), options)?)
    }

    fn omega(field: Field) -> f64 {
        match field {
            Field::Elastic => 4.0 * PI,
            Field::Solid | Field::Filtration => 2f64.sqrt() * PI,
        }
    }

    fn amplitude(&self, field: Field, t: f64) -> [f64; 3] {
        cosine(Self::omega(field), t)
    }

    fn profile(&self, field: Field, x: f64) -> Profile {
        match field {
            Field::Elastic => Profile { x: squared_sine(2.0, x), y: squared_sine(4.0, x) },
            Field::Solid => {
                let p = poro_profile(x);
                Profile { x: p, y: p }
            }
            Field::Filtration => {
                let p = poro_profile(x).map(|v| self.filtration_ratio * v);
                Profile { x: p, y: p }
            }
        }
    }

    fn lame(&self, field: Field) -> (f64, f64) {
        match field {
            Field::Elastic => (self.elastic.lambda, self.elastic.mu),
            _ => (self.poro.lambda, self.poro.mu),
        }
    }

    /// `∇·σ(U)` of the spatial profile.
    fn stress_divergence(&self, field: Field, x: f64) -> [f64; 2] {
        let (lambda, mu) = self.lame(field);
        let pr = self.profile(field, x);
        [(lambda + 2.0 * mu) * pr.x[2], mu * pr.y[2]]
    }

    /// Spatial part `P` of the pore pressure `p = a_p(t) P`.
    fn pressure_gradient(&self, x: f64) -> [f64; 2] {
        let m = self.poro.biot_modulus;
        let beta = self.poro.biot_coefficient;
        let solid = self.profile(Field::Solid, x);
        let filtration = self.profile(Field::Filtration, x);
        [-m * (beta * solid.x[2] + filtration.x[2]), 0.0]
    }

    /// Pore pressure `-m (β ∇·u_p + ∇·u_f)`.
    pub fn pressure(&self, x: Point, t: f64) -> f64 {
        let m = self.poro.biot_modulus;
        let beta = self.poro.biot_coefficient;
        let a = self.amplitude(Field::Solid, t)[0];
        let solid = self.profile(Field::Solid, x[0]);
        let filtration = self.profile(Field::Filtration, x[0]);
        -m * a * (beta * solid.x[1] + filtration.x[1])
    }

    fn bulk_density(&self) -> f64 {
        self.poro.porosity * self.poro.fluid_density + (1.0 - self.poro.porosity) * self.poro.solid_density
    }

    fn apparent_density(&self) -> f64 {
        self.poro.tortuosity / self.poro.porosity * self.poro.fluid_density
    }

    /// Time coefficients `(c_profile(t), c_operator(t))` of the load of
    /// `field`, so that the load is `c_profile U + c_operator W`.
    fn load_coefficients(&self, field: Field, t: f64) -> (f64, f64) {
        let k = self.filtration_ratio;
        let [a, da, dda] = self.amplitude(field, t);
        match field {
            Field::Elastic => {
                let (rho, z) = (self.elastic.density, self.elastic.damping);
                (rho * (dda + 2.0 * z * da + z * z * a), a)
            }
            Field::Solid => {
                let (rho, rf, z) = (self.bulk_density(), self.poro.fluid_density, self.poro.damping);
                ((rho + k * rf) * dda + 2.0 * rho * z * da + rho * z * z * a, a)
            }
            Field::Filtration => {
                let (rf, rw) = (self.poro.fluid_density, self.apparent_density());
                ((rf + k * rw) * dda + k * self.poro.drag() * da, a)
            }
        }
    }

    /// Spatial operator part `W` of the load of `field`.
    fn load_operator(&self, field: Field, x: f64) -> [f64; 2] {
        match field {
            Field::Elastic => self.stress_divergence(Field::Elastic, x).map(|v| -v),
            Field::Solid => {
                let beta = self.poro.biot_coefficient;
                let div = self.stress_divergence(Field::Solid, x);
                let gp = self.pressure_gradient(x);
                [-div[0] + beta * gp[0], -div[1] + beta * gp[1]]
            }
            Field::Filtration => self.pressure_gradient(x),
        }
    }

    /// Solid profile `U` used by the load of `field` (the filtration
    /// equation is driven by the solid profile).
    fn load_profile(&self, field: Field, x: f64) -> [f64; 2] {
        let f = if field == Field::Filtration { Field::Solid } else { field };
        let pr = self.profile(f, x);
        [pr.x[0], pr.y[0]]
    }

    /// Body loads `f_e`, `f_p` and `g_p` at `(x, t)`.
    pub fn body_force(&self, field: Field, x: Point, t: f64) -> [f64; 2] {
        let (cp, co) = self.load_coefficients(field, t);
        let u = self.load_profile(field, x[0]);
        let w = self.load_operator(field, x[0]);
        [cp * u[0] + co * w[0], cp * u[1] + co * w[1]]
    }

    /// Initial displacement and velocity, projected onto the space.
    pub fn initial_state(&self, disc: &Discretization) -> State {
        let space = disc.space();
        let mut state = State::zero(0.0, space.ndof());
        for field in Field::ALL {
            space.project_into(field, |x| self.displacement(field, x, 0.0), &mut state.displacement);
            space.project_into(field, |x| self.velocity(field, x, 0.0), &mut state.velocity);
        }
        state
    }

    /// Load vector `F(t)` with precomputed spatial parts.
    pub fn forcing(&self, disc: &Discretization) -> ManufacturedForcing {
        let n = disc.ndof();
        let loads = LoadAssembler::new(disc);
        let mut profile = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let mut operator = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for field in Field::ALL {
            let i = field.index();
            loads.add_body(|f, x| if f == field { self.load_profile(f, x[0]) } else { [0.0; 2] }, &mut profile[i]);
            loads.add_body(|f, x| if f == field { self.load_operator(f, x[0]) } else { [0.0; 2] }, &mut operator[i]);
        }
        // Dirichlet data scale with the elastic and poro amplitudes.
        let mut boundary = [vec![0.0; n], vec![0.0; n]];
        loads.add_dirichlet(
            |f, x| if f == Field::Elastic { self.displacement(f, x, 0.0) } else { [0.0; 2] },
            &mut boundary[0],
        );
        loads.add_dirichlet(
            |f, x| if f == Field::Elastic { [0.0; 2] } else { self.displacement(f, x, 0.0) },
            &mut boundary[1],
        );
        ManufacturedForcing { case: *self, profile, operator, boundary }
    }
}

impl ExactSolution for ManufacturedCase {
    fn displacement(&self, field: Field, x: Point, t: f64) -> [f64; 2] {
        let a = self.amplitude(field, t)[0];
        let pr = self.profile(field, x[0]);
        [a * pr.x[0], a * pr.y[0]]
    }

    fn velocity(&self, field: Field, x: Point, t: f64) -> [f64; 2] {
        let a = self.amplitude(field, t)[1];
        let pr = self.profile(field, x[0]);
        [a * pr.x[0], a * pr.y[0]]
    }

    fn gradient(&self, field: Field, x: Point, t: f64) -> [[f64; 2]; 2] {
        let a = self.amplitude(field, t)[0];
        let pr = self.profile(field, x[0]);
        [[a * pr.x[1], 0.0], [a * pr.y[1], 0.0]]
    }
}

/// `F(t) = Σ_fields c_profile(t) F_U + c_operator(t) F_W + boundary terms`.
#[derive(Clone, Debug)]
pub struct ManufacturedForcing {
    case: ManufacturedCase,
    profile: [Vec<f64>; 3],
    operator: [Vec<f64>; 3],
    boundary: [Vec<f64>; 2],
}

impl Forcing for ManufacturedForcing {
    fn add_load(&self, t: f64, out: &mut [f64]) {
        for field in Field::ALL {
            let i = field.index();
            let (cp, co) = self.case.load_coefficients(field, t);
            for ((o, p), w) in out.iter_mut().zip(&self.profile[i]).zip(&self.operator[i]) {
                *o += cp * p + co * w;
            }
        }
        let ae = self.case.amplitude(Field::Elastic, t)[0];
        let ap = self.case.amplitude(Field::Solid, t)[0];
        for ((o, e), p) in out.iter_mut().zip(&self.boundary[0]).zip(&self.boundary[1]) {
            *o += ae * e + ap * p;
        }
    }
}
