//! Element and face contributions.

use rayon::prelude::*;

use super::{BoundaryCondition, Discretization, ElementMaterial};
use crate::fespace::{Field, QuadratureRule, Tabulation};
use crate::geometry::Point;
use crate::linalg::{CsrMatrix, DenseMatrix, TripletBuilder};
use crate::mesh::FaceClass;

/// Dense block scattered to `dofs` in both rows and columns.
pub(super) struct Local {
    pub dofs: Vec<usize>,
    pub matrix: DenseMatrix,
}

fn collect(ndof: usize, locals: impl IntoIterator<Item = Local>) -> CsrMatrix {
    let mut t = TripletBuilder::new(ndof, ndof);
    for l in locals {
        t.push_scattered(&l.dofs, &l.dofs, &l.matrix);
    }
    t.build()
}

fn element_dofs(disc: &Discretization, e: usize) -> Vec<usize> {
    let dofs = disc.space().dofs();
    dofs.fields_on(e).flat_map(|f| dofs.block(f, e).expect("field on element")).collect()
}

/// `S_ij = ∫ φ_i φ_j`, `G[(c,i),(d,j)] = ∫ ∂_c φ_i ∂_d φ_j` and the elastic
/// stiffness `E[(c,i),(d,j)] = ∫ σ(φ_j e_d) : ε(φ_i e_c)`.
struct ElementIntegrals {
    nb: usize,
    mass: DenseMatrix,
    grad: DenseMatrix,
    elastic: DenseMatrix,
}

fn element_integrals(disc: &Discretization, e: usize) -> ElementIntegrals {
    let space = disc.space();
    let basis = space.basis(e);
    let rule = space.element_rule(e);
    let tab = Tabulation::new(basis, &rule.points);
    let nb = basis.len();
    let (lambda, mu) = disc.material(e).lame();
    let mut mass = DenseMatrix::zeros(nb, nb);
    let mut grad = DenseMatrix::zeros(2 * nb, 2 * nb);
    for (q, &w) in rule.weights.iter().enumerate() {
        let phi = tab.values_at(q);
        let g = tab.grads_at(q);
        for i in 0..nb {
            for j in 0..nb {
                mass[(i, j)] += w * phi[i] * phi[j];
                for c in 0..2 {
                    for d in 0..2 {
                        grad[(c * nb + i, d * nb + j)] += w * g[i][c] * g[j][d];
                    }
                }
            }
        }
    }
    let mut elastic = DenseMatrix::zeros(2 * nb, 2 * nb);
    for c in 0..2 {
        for d in 0..2 {
            for i in 0..nb {
                for j in 0..nb {
                    let lap = if c == d { grad[(i, j)] + grad[(nb + i, nb + j)] } else { 0.0 };
                    elastic[(c * nb + i, d * nb + j)] =
                        mu * (lap + grad[(d * nb + i, c * nb + j)]) + lambda * grad[(c * nb + i, d * nb + j)];
                }
            }
        }
    }
    ElementIntegrals { nb, mass, grad, elastic }
}

/// `coef[s][t] ⊗ (S ⊗ I₂)` over `nfields` fields.
fn mass_like(nb: usize, scalar: &DenseMatrix, coef: &[[f64; 2]; 2], nfields: usize) -> DenseMatrix {
    let n = 2 * nb;
    let mut m = DenseMatrix::zeros(nfields * n, nfields * n);
    for s in 0..nfields {
        for t in 0..nfields {
            let k = coef[s][t];
            if k == 0.0 {
                continue;
            }
            for c in 0..2 {
                for i in 0..nb {
                    for j in 0..nb {
                        m[(s * n + c * nb + i, t * n + c * nb + j)] = k * scalar[(i, j)];
                    }
                }
            }
        }
    }
    m
}

fn element_mass(disc: &Discretization, e: usize, ints: &ElementIntegrals) -> DenseMatrix {
    match disc.material(e) {
        ElementMaterial::Elastic(p) => mass_like(ints.nb, &ints.mass, &[[p.density, 0.0], [0.0, 0.0]], 1),
        ElementMaterial::Poro(p) => {
            let rf = p.params.fluid_density;
            let coef = [[p.derived.bulk_density, rf], [rf, p.derived.apparent_fluid_density]];
            mass_like(ints.nb, &ints.mass, &coef, 2)
        }
    }
}

fn element_damping(disc: &Discretization, e: usize, ints: &ElementIntegrals) -> DenseMatrix {
    match disc.material(e) {
        ElementMaterial::Elastic(p) => {
            mass_like(ints.nb, &ints.mass, &[[2.0 * p.density * p.damping, 0.0], [0.0, 0.0]], 1)
        }
        ElementMaterial::Poro(p) => {
            let coef = [[2.0 * p.derived.bulk_density * p.params.damping, 0.0], [0.0, p.params.drag()]];
            mass_like(ints.nb, &ints.mass, &coef, 2)
        }
    }
}

fn element_stiffness(disc: &Discretization, e: usize, ints: &ElementIntegrals) -> DenseMatrix {
    let nb = ints.nb;
    let n = 2 * nb;
    match disc.material(e) {
        ElementMaterial::Elastic(p) => {
            let zeta2 = p.density * p.damping * p.damping;
            let mut k = mass_like(nb, &ints.mass, &[[zeta2, 0.0], [0.0, 0.0]], 1);
            for a in 0..n {
                for b in 0..n {
                    k[(a, b)] += ints.elastic[(a, b)];
                }
            }
            k
        }
        ElementMaterial::Poro(p) => {
            let zeta2 = p.derived.bulk_density * p.params.damping * p.params.damping;
            let mut k = mass_like(nb, &ints.mass, &[[zeta2, 0.0], [0.0, 0.0]], 2);
            let m = p.params.biot_modulus;
            let beta = p.params.biot_coefficient;
            let coef = [[beta * beta * m, beta * m], [beta * m, m]];
            for a in 0..n {
                for b in 0..n {
                    // divergence of φ_i e_c is ∂_c φ_i: the (c,i),(d,j) entry of G
                    let div = ints.grad[(a, b)];
                    k[(a, b)] += ints.elastic[(a, b)] + coef[0][0] * div;
                    k[(a, n + b)] += coef[0][1] * div;
                    k[(n + a, b)] += coef[1][0] * div;
                    k[(n + a, n + b)] += coef[1][1] * div;
                }
            }
            k
        }
    }
}

fn element_locals(disc: &Discretization, kernel: fn(&Discretization, usize, &ElementIntegrals) -> DenseMatrix) -> Vec<Local> {
    (0..disc.space().mesh().n_elements())
        .into_par_iter()
        .map(|e| {
            let ints = element_integrals(disc, e);
            Local { dofs: element_dofs(disc, e), matrix: kernel(disc, e, &ints) }
        })
        .collect()
}

pub(super) fn assemble_mass(disc: &Discretization) -> CsrMatrix {
    collect(disc.ndof(), element_locals(disc, element_mass))
}

pub(super) fn assemble_damping(disc: &Discretization) -> CsrMatrix {
    let mut locals = element_locals(disc, element_damping);
    let faces: Vec<Local> = (0..disc.space().mesh().faces().len())
        .into_par_iter()
        .filter_map(|f| absorbing_face(disc, f))
        .collect();
    locals.extend(faces);
    collect(disc.ndof(), locals)
}

pub(super) fn assemble_stiffness(disc: &Discretization) -> CsrMatrix {
    let mut locals = element_locals(disc, element_stiffness);
    let faces: Vec<Vec<Local>> = (0..disc.space().mesh().faces().len())
        .into_par_iter()
        .map(|f| face_groups(disc, f).into_iter().filter(|g| !g.is_coupling()).map(|g| face_local(disc, f, g)).collect())
        .collect();
    locals.extend(faces.into_iter().flatten());
    collect(disc.ndof(), locals)
}

pub(super) fn assemble_coupling(disc: &Discretization) -> CsrMatrix {
    let faces: Vec<Vec<Local>> = (0..disc.space().mesh().faces().len())
        .into_par_iter()
        .map(|f| face_groups(disc, f).into_iter().filter(|g| g.is_coupling()).map(|g| face_local(disc, f, g)).collect())
        .collect();
    collect(disc.ndof(), faces.into_iter().flatten())
}

/// Families of face terms, each of the form
/// `-<T(u), J(v)> - <T(v), J(u)> + <π J(u), J(v)>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(super) enum FaceGroup {
    /// Displacement jump and averaged elastic traction of one field.
    Displacement(Field),
    /// Normal jump and averaged `m div` of `β u_p + u_f`.
    Divergence,
    /// `u_p - u_e` against the elastic traction on the interface.
    InterfaceDisplacement,
    /// `((1-δ)β u_p + u_f)·n` against `m div(β u_p + u_f)` on the interface.
    InterfaceFlow,
}

impl FaceGroup {
    pub fn is_coupling(self) -> bool {
        matches!(self, FaceGroup::InterfaceDisplacement | FaceGroup::InterfaceFlow)
    }
}

pub(super) fn face_groups(disc: &Discretization, f: usize) -> Vec<FaceGroup> {
    let face = disc.space().mesh().face(f);
    let dirichlet = disc.face_condition(f) == Some(BoundaryCondition::Dirichlet);
    match face.class {
        FaceClass::InteriorElastic => vec![FaceGroup::Displacement(Field::Elastic)],
        FaceClass::InteriorPoro => vec![FaceGroup::Displacement(Field::Solid), FaceGroup::Divergence],
        FaceClass::BoundaryElastic if dirichlet => vec![FaceGroup::Displacement(Field::Elastic)],
        FaceClass::BoundaryPoro if dirichlet => vec![FaceGroup::Displacement(Field::Solid), FaceGroup::Divergence],
        FaceClass::Interface => vec![FaceGroup::InterfaceDisplacement, FaceGroup::InterfaceFlow],
        _ => vec![],
    }
}

/// Jump `j` and traction `t` of one trial/test function at one point; scalar
/// groups use the first component only.
#[derive(Clone, Copy, Debug, Default)]
pub(super) struct Trace {
    pub jump: [f64; 2],
    pub traction: [f64; 2],
}

/// Traces of every dof touched by a face group at the face quadrature points.
pub(super) struct FaceTraces {
    pub rule: QuadratureRule,
    pub dofs: Vec<usize>,
    /// `traces[q * dofs.len() + a]`
    pub traces: Vec<Trace>,
    pub penalty: f64,
    pub normal: Point,
}

struct Side {
    element: usize,
    sign: f64,
    average: f64,
}

fn tabulate(disc: &Discretization, element: usize, points: &[Point]) -> Tabulation {
    Tabulation::new(disc.space().basis(element), points)
}

/// `σ(φ e_c) n` for a scalar mode with gradient `g`.
fn traction(lambda: f64, mu: f64, c: usize, g: [f64; 2], n: Point) -> [f64; 2] {
    let gn = g[0] * n[0] + g[1] * n[1];
    let mut t = [0.0; 2];
    for (r, tr) in t.iter_mut().enumerate() {
        let delta = if r == c { 1.0 } else { 0.0 };
        *tr = mu * (delta * gn + n[c] * g[r]) + lambda * g[c] * n[r];
    }
    t
}

pub(super) fn face_traces(disc: &Discretization, f: usize, group: FaceGroup) -> FaceTraces {
    let space = disc.space();
    let mesh = space.mesh();
    let face = mesh.face(f);
    let n = face.normal;
    let rule = space.face_rule(f);
    let nq = rule.len();
    let sides: Vec<Side> = match face.neighbor {
        Some(nb) => vec![
            Side { element: face.owner, sign: 1.0, average: 0.5 },
            Side { element: nb, sign: -1.0, average: 0.5 },
        ],
        None => vec![Side { element: face.owner, sign: 1.0, average: 1.0 }],
    };
    let dofmap = space.dofs();
    let delta = disc.options().delta;
    let mut parts: Vec<(usize, Field, Part)> = Vec::new();
    let penalty;
    match group {
        FaceGroup::Displacement(field) => {
            penalty = disc.penalties().alpha[f];
            for s in &sides {
                parts.push((s.element, field, Part::Vector { jump: s.sign, traction: s.average }));
            }
        }
        FaceGroup::Divergence => {
            penalty = disc.penalties().gamma[f].expect("gamma on poro faces");
            for s in &sides {
                let p = match disc.material(s.element) {
                    ElementMaterial::Poro(p) => p,
                    ElementMaterial::Elastic(_) => unreachable!("divergence group on an elastic element"),
                };
                let (m, beta) = (p.params.biot_modulus, p.params.biot_coefficient);
                parts.push((s.element, Field::Solid, Part::Normal { jump: s.sign * beta, traction: s.average * m * beta }));
                parts.push((s.element, Field::Filtration, Part::Normal { jump: s.sign, traction: s.average * m }));
            }
        }
        FaceGroup::InterfaceDisplacement => {
            penalty = disc.penalties().alpha[f];
            let poro = face.owner;
            let elastic = face.neighbor.expect("interface has two sides");
            parts.push((poro, Field::Solid, Part::Vector { jump: 1.0, traction: 0.0 }));
            parts.push((elastic, Field::Elastic, Part::Vector { jump: -1.0, traction: 1.0 }));
        }
        FaceGroup::InterfaceFlow => {
            penalty = disc.penalties().gamma[f].expect("gamma on interface faces");
            let poro = face.owner;
            let p = match disc.material(poro) {
                ElementMaterial::Poro(p) => p,
                ElementMaterial::Elastic(_) => unreachable!("interface owner is poro-elastic"),
            };
            let (m, beta) = (p.params.biot_modulus, p.params.biot_coefficient);
            parts.push((poro, Field::Solid, Part::Normal { jump: (1.0 - delta) * beta, traction: m * beta }));
            parts.push((poro, Field::Filtration, Part::Normal { jump: 1.0, traction: m }));
        }
    }
    let mut dofs = Vec::new();
    let mut layout = Vec::new();
    for (k, &(e, field, _)) in parts.iter().enumerate() {
        let off = dofmap.offset(field, e).expect("field on element");
        let nb = dofmap.n_modes(e);
        for c in 0..2 {
            for i in 0..nb {
                dofs.push(off + c * nb + i);
                layout.push((k, c, i));
            }
        }
    }
    let tabs: Vec<Tabulation> = parts.iter().map(|&(e, _, _)| tabulate(disc, e, &rule.points)).collect();
    let lames: Vec<(f64, f64)> = parts.iter().map(|&(e, _, _)| disc.material(e).lame()).collect();
    let nd = dofs.len();
    let mut traces = vec![Trace::default(); nq * nd];
    for q in 0..nq {
        for (a, &(k, c, i)) in layout.iter().enumerate() {
            let phi = tabs[k].value(q, i);
            let g = tabs[k].grad(q, i);
            let tr = &mut traces[q * nd + a];
            match parts[k].2 {
                Part::Vector { jump, traction: tw } => {
                    tr.jump[c] = jump * phi;
                    if tw != 0.0 {
                        let (l, mu) = lames[k];
                        let t = traction(l, mu, c, g, n);
                        tr.traction = [tw * t[0], tw * t[1]];
                    }
                }
                Part::Normal { jump, traction: tw } => {
                    tr.jump[0] = jump * phi * n[c];
                    tr.traction[0] = tw * g[c];
                }
            }
        }
    }
    FaceTraces { rule, dofs, traces, penalty, normal: n }
}

#[derive(Clone, Copy, Debug)]
enum Part {
    /// Jump `jump · φ e_c`, traction `traction · σ(φ e_c) n`.
    Vector { jump: f64, traction: f64 },
    /// Jump `jump · φ n_c`, traction `traction · ∂_c φ`.
    Normal { jump: f64, traction: f64 },
}

fn face_local(disc: &Discretization, f: usize, group: FaceGroup) -> Local {
    let ft = face_traces(disc, f, group);
    let nd = ft.dofs.len();
    let mut k = DenseMatrix::zeros(nd, nd);
    let dot = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
    for (q, &w) in ft.rule.weights.iter().enumerate() {
        let tr = &ft.traces[q * nd..(q + 1) * nd];
        for a in 0..nd {
            for b in 0..nd {
                let (ta, tb) = (tr[a], tr[b]);
                k[(a, b)] += w * (ft.penalty * dot(ta.jump, tb.jump) - dot(ta.traction, tb.jump) - dot(tb.traction, ta.jump));
            }
        }
    }
    Local { dofs: ft.dofs, matrix: k }
}

/// Paraxial boundary terms, velocity-proportional and dissipative.
fn absorbing_face(disc: &Discretization, f: usize) -> Option<Local> {
    if disc.face_condition(f) != Some(BoundaryCondition::Absorbing) {
        return None;
    }
    let space = disc.space();
    let face = space.mesh().face(f);
    let e = face.owner;
    let n = face.normal;
    let t = [-n[1], n[0]];
    let rule = space.face_rule(f);
    let tab = tabulate(disc, e, &rule.points);
    let nb = tab.n_modes;
    // coefficients of (u·n)(v·n) and (u·t)(v·t) between field slots
    let (normal, tangential, fields): ([[f64; 2]; 2], [[f64; 2]; 2], Vec<Field>) = match disc.material(e) {
        ElementMaterial::Elastic(p) => {
            let (cp, cs) = (((p.lambda + 2.0 * p.mu) / p.density).sqrt(), (p.mu / p.density).sqrt());
            ([[p.density * cp, 0.0], [0.0, 0.0]], [[p.density * cs, 0.0], [0.0, 0.0]], vec![Field::Elastic])
        }
        ElementMaterial::Poro(p) => {
            let d = &p.derived;
            let rf = p.params.fluid_density;
            let cross = rf * (d.fast_p_speed * d.slow_p_speed).sqrt();
            let shear_mass = d.bulk_density - rf * p.params.porosity / p.params.tortuosity;
            (
                [[d.bulk_density * d.fast_p_speed, cross], [cross, d.apparent_fluid_density * d.slow_p_speed]],
                [[shear_mass * d.shear_speed, 0.0], [0.0, 0.0]],
                vec![Field::Solid, Field::Filtration],
            )
        }
    };
    let nf = fields.len();
    let dofs: Vec<usize> = fields
        .iter()
        .flat_map(|&fl| space.dofs().block(fl, e).expect("field on element"))
        .collect();
    let mut k = DenseMatrix::zeros(dofs.len(), dofs.len());
    let n2 = 2 * nb;
    for (q, &w) in rule.weights.iter().enumerate() {
        let phi = tab.values_at(q);
        for s in 0..nf {
            for r in 0..nf {
                let (kn, kt) = (normal[s][r], tangential[s][r]);
                if kn == 0.0 && kt == 0.0 {
                    continue;
                }
                for c in 0..2 {
                    for d in 0..2 {
                        let coef = w * (kn * n[c] * n[d] + kt * t[c] * t[d]);
                        for i in 0..nb {
                            for j in 0..nb {
                                k[(s * n2 + c * nb + i, r * n2 + d * nb + j)] += coef * phi[i] * phi[j];
                            }
                        }
                    }
                }
            }
        }
    }
    Some(Local { dofs, matrix: k })
}
