//! Right-hand sides: body forces, weak Dirichlet data and point sources.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernels::{face_groups, face_traces, FaceGroup, FaceTraces};
use super::{AssemblyError, BoundaryCondition, Discretization, ElementMaterial};
use crate::fespace::{Field, QuadratureRule, Tabulation};
use crate::geometry::Point;
use crate::mesh::{Location, Region};

/// Ricker wavelet `(1 - 2β(t-t0)²) exp(-β(t-t0)²)`, `β = π² f²`.
pub fn ricker(t: f64, peak_frequency: f64, delay: f64) -> f64 {
    let b = (std::f64::consts::PI * peak_frequency).powi(2);
    let s = (t - delay).powi(2);
    (1.0 - 2.0 * b * s) * (-b * s).exp()
}

/// Time-dependent load vector `F(t)`.
pub trait Forcing: Sync {
    /// Adds `F(t)` to `out`.
    fn add_load(&self, t: f64, out: &mut [f64]);

    fn is_zero(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct NoForcing;

impl Forcing for NoForcing {
    fn add_load(&self, _t: f64, _out: &mut [f64]) {}

    fn is_zero(&self) -> bool {
        true
    }
}

/// Isotropic moment-tensor point source `-M₀ ∇δ(x - x_s) S(t)` with a Ricker
/// time function, applied to every field at the source location.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentSource {
    pub position: Point,
    #[serde(default = "unit")]
    pub moment: f64,
    pub peak_frequency: f64,
    pub delay: f64,
    /// Region the source must lie in, when given.
    #[serde(default)]
    pub region: Option<Region>,
}

fn unit() -> f64 {
    1.0
}

impl MomentSource {
    pub fn wavelet(&self, t: f64) -> f64 {
        ricker(t, self.peak_frequency, self.delay)
    }

    /// Spatial part `M₀ (∇·v)(x_s)` over all test functions.
    pub fn load_vector(&self, disc: &Discretization) -> Result<Vec<f64>, AssemblyError> {
        let space = disc.space();
        let x = self.position;
        let e = match space.mesh().locate(x) {
            Location::Inside(e) => e,
            Location::OnBoundary(element) => {
                return Err(AssemblyError::SourceOnElementBoundary { point: x, element })
            }
            Location::Outside => return Err(AssemblyError::SourceOutsideMesh(x)),
        };
        let found = space.mesh().element(e).region;
        if let Some(expected) = self.region {
            if expected != found {
                return Err(AssemblyError::SourceRegion { point: x, expected, found });
            }
        }
        let basis = space.basis(e);
        let nb = basis.len();
        let mut values = vec![0.0; nb];
        let mut grads = vec![[0.0; 2]; nb];
        basis.eval(x, &mut values, &mut grads);
        let mut out = vec![0.0; space.ndof()];
        for field in space.dofs().fields_on(e) {
            let off = space.dofs().offset(field, e).expect("field on element");
            for c in 0..2 {
                for i in 0..nb {
                    out[off + c * nb + i] = self.moment * grads[i][c];
                }
            }
        }
        Ok(out)
    }
}

/// `S(t) · b` for a fixed spatial vector `b`.
#[derive(Clone, Debug)]
pub struct PointSourceForcing {
    pub source: MomentSource,
    pub vector: Vec<f64>,
}

impl PointSourceForcing {
    pub fn new(disc: &Discretization, source: MomentSource) -> Result<Self, AssemblyError> {
        Ok(PointSourceForcing { vector: source.load_vector(disc)?, source })
    }
}

impl Forcing for PointSourceForcing {
    fn add_load(&self, t: f64, out: &mut [f64]) {
        let s = self.source.wavelet(t);
        out.iter_mut().zip(&self.vector).for_each(|(o, v)| *o += s * v);
    }
}

/// Cached quadrature data for integrating loads.
pub struct LoadAssembler<'a> {
    disc: &'a Discretization,
    elements: Vec<(QuadratureRule, Tabulation)>,
    dirichlet: Vec<(FaceGroup, FaceTraces, f64)>,
}

impl<'a> LoadAssembler<'a> {
    pub fn new(disc: &'a Discretization) -> Self {
        let space = disc.space();
        let mesh = space.mesh();
        let elements = (0..mesh.n_elements())
            .into_par_iter()
            .map(|e| {
                let rule = space.element_rule(e).clone();
                let tab = Tabulation::new(space.basis(e), &rule.points);
                (rule, tab)
            })
            .collect();
        let mut dirichlet = Vec::new();
        for f in 0..mesh.faces().len() {
            if disc.face_condition(f) != Some(BoundaryCondition::Dirichlet) {
                continue;
            }
            let beta = match disc.material(mesh.face(f).owner) {
                ElementMaterial::Poro(p) => p.params.biot_coefficient,
                ElementMaterial::Elastic(_) => 0.0,
            };
            for g in face_groups(disc, f) {
                dirichlet.push((g, face_traces(disc, f, g), beta));
            }
        }
        LoadAssembler { disc, elements, dirichlet }
    }

    pub fn discretization(&self) -> &Discretization {
        self.disc
    }

    /// Adds `∫ f(field, x) · v` for every field.
    pub fn add_body<F>(&self, f: F, out: &mut [f64])
    where
        F: Fn(Field, Point) -> [f64; 2] + Sync,
    {
        let dofs = self.disc.space().dofs();
        let parts: Vec<Vec<(usize, Vec<f64>)>> = self
            .elements
            .par_iter()
            .enumerate()
            .map(|(e, (rule, tab))| {
                let nb = tab.n_modes;
                dofs.fields_on(e)
                    .map(|field| {
                        let mut local = vec![0.0; 2 * nb];
                        for (q, (&x, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
                            let v = f(field, x);
                            let phi = tab.values_at(q);
                            for i in 0..nb {
                                local[i] += w * v[0] * phi[i];
                                local[nb + i] += w * v[1] * phi[i];
                            }
                        }
                        (dofs.offset(field, e).expect("field on element"), local)
                    })
                    .collect()
            })
            .collect();
        for (off, local) in parts.into_iter().flatten() {
            out[off..off + local.len()].iter_mut().zip(&local).for_each(|(o, v)| *o += v);
        }
    }

    /// Adds the weak Dirichlet terms `-<g, T(v)> + <π g, J(v)>` for boundary
    /// data `g(field, x)` on Dirichlet faces.
    pub fn add_dirichlet<G>(&self, g: G, out: &mut [f64])
    where
        G: Fn(Field, Point) -> [f64; 2],
    {
        for (group, ft, beta) in &self.dirichlet {
            let nd = ft.dofs.len();
            for (q, (&x, &w)) in ft.rule.points.iter().zip(&ft.rule.weights).enumerate() {
                let data = match group {
                    FaceGroup::Displacement(field) => g(*field, x),
                    FaceGroup::Divergence => {
                        let n = ft.normal;
                        let (up, uf) = (g(Field::Solid, x), g(Field::Filtration, x));
                        [(beta * up[0] + uf[0]) * n[0] + (beta * up[1] + uf[1]) * n[1], 0.0]
                    }
                    _ => continue,
                };
                for (a, tr) in ft.traces[q * nd..(q + 1) * nd].iter().enumerate() {
                    let jump = tr.jump[0] * data[0] + tr.jump[1] * data[1];
                    let traction = tr.traction[0] * data[0] + tr.traction[1] * data[1];
                    out[ft.dofs[a]] += w * (ft.penalty * jump - traction);
                }
            }
        }
    }
}
