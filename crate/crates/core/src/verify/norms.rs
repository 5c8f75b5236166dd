//! Error norms of a discrete solution against closed-form fields.

use rayon::prelude::*;
use serde::Serialize;

use super::ExactSolution;
use crate::assembly::{BoundaryCondition, Discretization, ElementMaterial};
use crate::fespace::{combine, Field, PointValue, QuadratureRule, Tabulation};
use crate::geometry::Point;
use crate::mesh::FaceClass;
use crate::timedg::{Observer, SlabView, State};

/// Norms of `U - U_h` at one instant. All entries are norms, not squares.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ErrorNorms {
    /// Density-weighted L2 norm of the displacement error.
    pub l2: f64,
    /// Same norm of the velocity error.
    pub velocity: f64,
    pub dg_elastic: f64,
    pub dg_solid: f64,
    /// Divergence seminorm of `β e_p + e_f`.
    pub dg_divergence: f64,
    pub interface: f64,
    /// `(∫ D(ė, ė) dt)^½` over the run.
    pub damping_integral: f64,
    /// `D(e, e)^½` at the initial time.
    pub initial_damping: f64,
    pub energy: f64,
}

impl ErrorNorms {
    fn finish(mut self) -> Self {
        self.energy = [
            self.velocity,
            self.dg_elastic,
            self.dg_solid,
            self.dg_divergence,
            self.interface,
            self.damping_integral,
            self.initial_damping,
        ]
        .iter()
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
        self
    }

    /// dG seminorm `|e|_dG` of all fields.
    pub fn dg(&self) -> f64 {
        (self.dg_elastic.powi(2) + self.dg_solid.powi(2) + self.dg_divergence.powi(2)).sqrt()
    }
}

struct ElementData {
    rule: QuadratureRule,
    tab: Tabulation,
}

struct FaceData {
    face: usize,
    rule: QuadratureRule,
    owner: Tabulation,
    neighbor: Option<Tabulation>,
}

/// Quadrature two orders above assembly, cached per element and face.
pub struct ErrorIntegrator<'a> {
    disc: &'a Discretization,
    elements: Vec<ElementData>,
    faces: Vec<FaceData>,
}

#[derive(Clone, Copy, Default)]
struct Squares {
    l2: f64,
    velocity: f64,
    dg_elastic: f64,
    dg_solid: f64,
    dg_divergence: f64,
    interface: f64,
}

impl std::ops::Add for Squares {
    type Output = Squares;
    fn add(self, o: Squares) -> Squares {
        Squares {
            l2: self.l2 + o.l2,
            velocity: self.velocity + o.velocity,
            dg_elastic: self.dg_elastic + o.dg_elastic,
            dg_solid: self.dg_solid + o.dg_solid,
            dg_divergence: self.dg_divergence + o.dg_divergence,
            interface: self.interface + o.interface,
        }
    }
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn sq(a: [f64; 2]) -> f64 {
    a[0] * a[0] + a[1] * a[1]
}

/// `ℂ ε : ε = 2μ ε:ε + λ (tr ε)²`.
fn strain_energy(lambda: f64, mu: f64, g: [[f64; 2]; 2]) -> f64 {
    let exy = 0.5 * (g[0][1] + g[1][0]);
    let tr = g[0][0] + g[1][1];
    2.0 * mu * (g[0][0] * g[0][0] + g[1][1] * g[1][1] + 2.0 * exy * exy) + lambda * tr * tr
}

fn grad_sub(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

impl<'a> ErrorIntegrator<'a> {
    pub fn new(disc: &'a Discretization) -> Self {
        let space = disc.space();
        let mesh = space.mesh();
        let elements = (0..mesh.n_elements())
            .into_par_iter()
            .map(|e| {
                let rule = space.element_rule_of_degree(e, 2 * space.dofs().degree(e) + 4);
                let tab = Tabulation::new(space.basis(e), &rule.points);
                ElementData { rule, tab }
            })
            .collect();
        let faces = (0..mesh.faces().len())
            .filter(|&f| {
                let face = mesh.face(f);
                !face.class.is_boundary() || disc.face_condition(f) == Some(BoundaryCondition::Dirichlet)
            })
            .map(|f| {
                let face = mesh.face(f);
                let mut p = space.dofs().degree(face.owner);
                if let Some(n) = face.neighbor {
                    p = p.max(space.dofs().degree(n));
                }
                let rule = space.face_rule_with_points(f, p + 3);
                let owner = Tabulation::new(space.basis(face.owner), &rule.points);
                let neighbor = face.neighbor.map(|n| Tabulation::new(space.basis(n), &rule.points));
                FaceData { face: f, rule, owner, neighbor }
            })
            .collect();
        ErrorIntegrator { disc, elements, faces }
    }

    pub fn discretization(&self) -> &Discretization {
        self.disc
    }

    fn value(&self, coeffs: &[f64], field: Field, element: usize, tab: &Tabulation, q: usize) -> PointValue {
        let dofs = self.disc.space().dofs();
        match dofs.block(field, element) {
            Some(block) => combine(&coeffs[block], tab.values_at(q), tab.grads_at(q)),
            None => PointValue::default(),
        }
    }

    /// Weighted L2 integrand `ρ_e|e_e|²` or `ρ_u|e_p|² + ρ_f φ |e_p + e_f/φ|²`.
    fn mass_density(&self, element: usize, err: &[[f64; 2]; 3]) -> f64 {
        match self.disc.material(element) {
            ElementMaterial::Elastic(m) => m.density * sq(err[0]),
            ElementMaterial::Poro(m) => {
                let phi = m.params.porosity;
                let rel = [err[1][0] + err[2][0] / phi, err[1][1] + err[2][1] / phi];
                m.derived.norm_density * sq(err[1]) + m.params.fluid_density * phi * sq(rel)
            }
        }
    }

    /// Element damping integrand `2ρζ|e|²` (+ `η/k |e_f|²`).
    fn damping_density(&self, element: usize, err: &[[f64; 2]; 3]) -> f64 {
        match self.disc.material(element) {
            ElementMaterial::Elastic(m) => 2.0 * m.density * m.damping * sq(err[0]),
            ElementMaterial::Poro(m) => {
                2.0 * m.derived.bulk_density * m.params.damping * sq(err[1]) + m.params.drag() * sq(err[2])
            }
        }
    }

    fn element_errors(&self, e: usize, state: &State, exact: &dyn ExactSolution, t: f64) -> Squares {
        let data = &self.elements[e];
        let fields: Vec<Field> = self.disc.space().dofs().fields_on(e).collect();
        let mut out = Squares::default();
        for (q, (&x, &w)) in data.rule.points.iter().zip(&data.rule.weights).enumerate() {
            let mut disp = [[0.0; 2]; 3];
            let mut vel = [[0.0; 2]; 3];
            let mut grad = [[[0.0; 2]; 2]; 3];
            for &field in &fields {
                let i = field.index();
                let uh = self.value(&state.displacement, field, e, &data.tab, q);
                let vh = self.value(&state.velocity, field, e, &data.tab, q);
                disp[i] = sub(exact.displacement(field, x, t), uh.value);
                vel[i] = sub(exact.velocity(field, x, t), vh.value);
                grad[i] = grad_sub(exact.gradient(field, x, t), uh.grad);
            }
            out.l2 += w * self.mass_density(e, &disp);
            out.velocity += w * self.mass_density(e, &vel);
            match self.disc.material(e) {
                ElementMaterial::Elastic(m) => out.dg_elastic += w * strain_energy(m.lambda, m.mu, grad[0]),
                ElementMaterial::Poro(m) => {
                    let p = &m.params;
                    out.dg_solid += w * strain_energy(p.lambda, p.mu, grad[1]);
                    let div = p.biot_coefficient * (grad[1][0][0] + grad[1][1][1]) + grad[2][0][0] + grad[2][1][1];
                    out.dg_divergence += w * p.biot_modulus * div * div;
                }
            }
        }
        out
    }

    fn trace(&self, coeffs: &[f64], field: Field, element: usize, tab: &Tabulation, q: usize, exact: &dyn ExactSolution, x: Point, t: f64) -> [f64; 2] {
        sub(exact.displacement(field, x, t), self.value(coeffs, field, element, tab, q).value)
    }

    fn face_errors(&self, data: &FaceData, u: &[f64], exact: &dyn ExactSolution, t: f64) -> Squares {
        let mesh = self.disc.space().mesh();
        let face = mesh.face(data.face);
        let penalties = self.disc.penalties();
        let alpha = penalties.alpha[data.face];
        let gamma = penalties.gamma[data.face].unwrap_or(0.0);
        let n = face.normal;
        let beta = |e: usize| match self.disc.material(e) {
            ElementMaterial::Poro(m) => m.params.biot_coefficient,
            ElementMaterial::Elastic(_) => 0.0,
        };
        let mut out = Squares::default();
        for (q, (&x, &w)) in data.rule.points.iter().zip(&data.rule.weights).enumerate() {
            let own = |f: Field| self.trace(u, f, face.owner, &data.owner, q, exact, x, t);
            let other = |f: Field| match (face.neighbor, &data.neighbor) {
                (Some(nb), Some(tab)) => self.trace(u, f, nb, tab, q, exact, x, t),
                _ => [0.0; 2],
            };
            match face.class {
                FaceClass::InteriorElastic | FaceClass::BoundaryElastic => {
                    out.dg_elastic += w * alpha * sq(sub(own(Field::Elastic), other(Field::Elastic)));
                }
                FaceClass::InteriorPoro | FaceClass::BoundaryPoro => {
                    let b = beta(face.owner);
                    out.dg_solid += w * alpha * sq(sub(own(Field::Solid), other(Field::Solid)));
                    let comb = |s: [f64; 2], f: [f64; 2]| [b * s[0] + f[0], b * s[1] + f[1]];
                    let jump = sub(comb(own(Field::Solid), own(Field::Filtration)), comb(other(Field::Solid), other(Field::Filtration)));
                    let normal = jump[0] * n[0] + jump[1] * n[1];
                    out.dg_divergence += w * gamma * normal * normal;
                }
                FaceClass::Interface => {
                    // owner is the poro-elastic side and n points out of it
                    let b = beta(face.owner);
                    let delta = self.disc.options().delta;
                    out.interface += w * alpha * sq(sub(own(Field::Solid), other(Field::Elastic)));
                    let (s, f) = (own(Field::Solid), own(Field::Filtration));
                    let flow = ((1.0 - delta) * b * s[0] + f[0]) * n[0] + ((1.0 - delta) * b * s[1] + f[1]) * n[1];
                    out.interface += w * gamma * flow * flow;
                }
            }
        }
        out
    }

    /// `D(ė, ė)` from element damping, for a velocity vector at time `t`.
    pub fn damping_rate(&self, velocity: &[f64], exact: &dyn ExactSolution, t: f64) -> f64 {
        (0..self.elements.len())
            .into_par_iter()
            .map(|e| {
                let data = &self.elements[e];
                let mut sum = 0.0;
                for (q, (&x, &w)) in data.rule.points.iter().zip(&data.rule.weights).enumerate() {
                    let mut err = [[0.0; 2]; 3];
                    for field in self.disc.space().dofs().fields_on(e) {
                        let vh = self.value(velocity, field, e, &data.tab, q);
                        err[field.index()] = sub(exact.velocity(field, x, t), vh.value);
                    }
                    sum += w * self.damping_density(e, &err);
                }
                sum
            })
            .sum()
    }

    /// `D(e, e)` for a displacement vector at time `t`.
    pub fn displacement_damping(&self, displacement: &[f64], exact: &dyn ExactSolution, t: f64) -> f64 {
        let shifted = DisplacementAsVelocity(exact);
        self.damping_rate(displacement, &shifted, t)
    }

    /// Instantaneous norms; the time-integrated damping terms are taken from
    /// `history` when given.
    pub fn errors(&self, state: &State, exact: &dyn ExactSolution, history: Option<&DampingHistory>) -> ErrorNorms {
        let t = state.time;
        let elems = (0..self.elements.len())
            .into_par_iter()
            .map(|e| self.element_errors(e, state, exact, t))
            .reduce(Squares::default, |a, b| a + b);
        let faces = self
            .faces
            .par_iter()
            .map(|d| self.face_errors(d, &state.displacement, exact, t))
            .reduce(Squares::default, |a, b| a + b);
        let s = elems + faces;
        let (integral, initial) = history.map_or((0.0, 0.0), |h| (h.integral, h.initial));
        ErrorNorms {
            l2: s.l2.sqrt(),
            velocity: s.velocity.sqrt(),
            dg_elastic: s.dg_elastic.sqrt(),
            dg_solid: s.dg_solid.sqrt(),
            dg_divergence: s.dg_divergence.sqrt(),
            interface: s.interface.sqrt(),
            damping_integral: integral.max(0.0).sqrt(),
            initial_damping: initial.max(0.0).sqrt(),
            energy: 0.0,
        }
        .finish()
    }
}

struct DisplacementAsVelocity<'e>(&'e dyn ExactSolution);

impl ExactSolution for DisplacementAsVelocity<'_> {
    fn displacement(&self, field: Field, x: Point, t: f64) -> [f64; 2] {
        self.0.displacement(field, x, t)
    }

    fn velocity(&self, field: Field, x: Point, t: f64) -> [f64; 2] {
        self.0.displacement(field, x, t)
    }

    fn gradient(&self, field: Field, x: Point, t: f64) -> [[f64; 2]; 2] {
        self.0.gradient(field, x, t)
    }
}

/// Observer accumulating `∫ D(ė, ė) dt` with the slab quadrature.
pub struct DampingHistory<'i, 'a> {
    integrator: &'i ErrorIntegrator<'a>,
    exact: &'i dyn ExactSolution,
    pub integral: f64,
    pub initial: f64,
}

impl<'i, 'a> DampingHistory<'i, 'a> {
    pub fn new(integrator: &'i ErrorIntegrator<'a>, exact: &'i dyn ExactSolution) -> Self {
        DampingHistory { integrator, exact, integral: 0.0, initial: 0.0 }
    }
}

impl Observer for DampingHistory<'_, '_> {
    fn initial(&mut self, state: &State) {
        self.initial = self.integrator.displacement_damping(&state.displacement, self.exact, state.time);
    }

    fn slab(&mut self, view: &SlabView<'_>) {
        let s = view.solution;
        for ((&t, &w), v) in s.times.iter().zip(&s.weights).zip(&s.velocity) {
            self.integral += w * self.integrator.damping_rate(v, self.exact, t);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::ManufacturedCase;

    struct Zero;

    impl ExactSolution for Zero {
        fn displacement(&self, _: Field, _: Point, _: f64) -> [f64; 2] {
            [0.0; 2]
        }
        fn velocity(&self, _: Field, _: Point, _: f64) -> [f64; 2] {
            [0.0; 2]
        }
        fn gradient(&self, _: Field, _: Point, _: f64) -> [[f64; 2]; 2] {
            [[0.0; 2]; 2]
        }
    }

    fn projected(case: &ManufacturedCase, disc: &Discretization, t: f64) -> State {
        let space = disc.space();
        let mut state = State::zero(t, space.ndof());
        for field in Field::ALL {
            space.project_into(field, |x| case.displacement(field, x, t), &mut state.displacement);
            space.project_into(field, |x| case.velocity(field, x, t), &mut state.velocity);
        }
        state
    }

    #[test]
    fn zero_solution_has_zero_errors() {
        let case = ManufacturedCase::new();
        let disc = case.discretization(ManufacturedCase::mesh(10, 1).unwrap(), 1, 10.0, 10.0).unwrap();
        let integ = ErrorIntegrator::new(&disc);
        let norms = integ.errors(&State::zero(0.3, disc.ndof()), &Zero, None);
        assert_eq!(norms, ErrorNorms::default());
    }

    #[test]
    fn projection_error_is_positive_and_decreases() {
        let case = ManufacturedCase::new();
        let mut previous = f64::INFINITY;
        for n in [20, 80] {
            let disc = case.discretization(ManufacturedCase::mesh(n, 5).unwrap(), 2, 10.0, 10.0).unwrap();
            let integ = ErrorIntegrator::new(&disc);
            let state = projected(&case, &disc, 0.3);
            let norms = integ.errors(&state, &case, None);
            assert!(norms.energy > 0.0 && norms.l2 > 0.0);
            for part in [norms.velocity, norms.dg(), norms.interface, norms.l2] {
                assert!(part >= 0.0 && part <= norms.energy.max(norms.l2));
            }
            assert!(norms.energy < previous);
            previous = norms.energy;
        }
    }

    #[test]
    fn weighted_l2_of_known_field() {
        // error e_e = (1, 0) on the elastic square: ρ_e · area = 1
        struct Unit;
        impl ExactSolution for Unit {
            fn displacement(&self, f: Field, _: Point, _: f64) -> [f64; 2] {
                if f == Field::Elastic { [1.0, 0.0] } else { [0.0; 2] }
            }
            fn velocity(&self, _: Field, _: Point, _: f64) -> [f64; 2] {
                [0.0; 2]
            }
            fn gradient(&self, _: Field, _: Point, _: f64) -> [[f64; 2]; 2] {
                [[0.0; 2]; 2]
            }
        }
        let case = ManufacturedCase::new();
        let disc = case.discretization(ManufacturedCase::mesh(10, 2).unwrap(), 1, 10.0, 10.0).unwrap();
        let integ = ErrorIntegrator::new(&disc);
        let norms = integ.errors(&State::zero(0.0, disc.ndof()), &Unit, None);
        assert!((norms.l2 - 1.0).abs() < 1e-12);
        // D(e, e) = 2 ρ ζ · area
        let d = integ.displacement_damping(&vec![0.0; disc.ndof()], &Unit, 0.0);
        assert!((d - 2.0).abs() < 1e-12);
    }
}
