//! Mass, damping and stiffness matrices and load vectors of the semi-discrete
//! system `M ü + D u̇ + (A + B + C) u = F`.

mod kernels;
mod load;
mod penalty;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use load::{ricker, Forcing, LoadAssembler, MomentSource, NoForcing, PointSourceForcing};
pub use penalty::{penalty_value, PenaltyField};

use crate::fespace::{FeSpace, Field};
use crate::linalg::{CsrMatrix, LinalgError};
use crate::materials::{stiffness_norm, ElasticParams, Materials, PoroMaterial};
use crate::mesh::{BoundarySide, FaceClass, Region};

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("no material given for the {0} region")]
    MissingMaterial(Region),
    #[error("delta = {0} is outside [0, 1]")]
    InvalidDelta(f64),
    #[error("penalty constant {name} = {value} must be positive")]
    InvalidPenalty { name: &'static str, value: f64 },
    #[error("source at ({}, {}) lies outside the mesh", .0[0], .0[1])]
    SourceOutsideMesh([f64; 2]),
    #[error("source at ({}, {}) lies on the boundary of element {element}; move it slightly", .point[0], .point[1])]
    SourceOnElementBoundary { point: [f64; 2], element: usize },
    #[error("source at ({}, {}) is in the {found} region, expected {expected}", .point[0], .point[1])]
    SourceRegion { point: [f64; 2], expected: Region, found: Region },
    #[error("internal assembly error: {0}")]
    Internal(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl AssemblyError {
    pub fn is_validation(&self) -> bool {
        !matches!(self, AssemblyError::Internal(_) | AssemblyError::Linalg(_))
    }
}

/// Condition on one side of the outer boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Prescribed displacement, imposed weakly through penalized traces.
    Dirichlet,
    /// Zero traction and zero pore pressure.
    FreeSurface,
    /// First-order paraxial condition, assembled into the damping matrix.
    Absorbing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConditions {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
    pub bottom: BoundaryCondition,
    pub top: BoundaryCondition,
}

impl BoundaryConditions {
    pub fn uniform(bc: BoundaryCondition) -> Self {
        BoundaryConditions { left: bc, right: bc, bottom: bc, top: bc }
    }

    pub fn on(&self, side: BoundarySide) -> BoundaryCondition {
        match side {
            BoundarySide::Left => self.left,
            BoundarySide::Right => self.right,
            BoundarySide::Bottom => self.bottom,
            BoundarySide::Top => self.top,
        }
    }
}

impl Default for BoundaryConditions {
    fn default() -> Self {
        Self::uniform(BoundaryCondition::Dirichlet)
    }
}

/// Penalty constants and the interface entry resistance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FormOptions {
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
}

impl Default for FormOptions {
    fn default() -> Self {
        FormOptions { c1: 10.0, c2: 10.0, delta: 1.0 }
    }
}

/// Material seen by one element.
#[derive(Clone, Copy, Debug)]
pub enum ElementMaterial<'a> {
    Elastic(&'a ElasticParams),
    Poro(&'a PoroMaterial),
}

impl ElementMaterial<'_> {
    /// Lamé coefficients of the (drained) skeleton.
    pub fn lame(&self) -> (f64, f64) {
        match self {
            ElementMaterial::Elastic(p) => (p.lambda, p.mu),
            ElementMaterial::Poro(p) => (p.params.lambda, p.params.mu),
        }
    }

    pub fn stiffness_norm(&self) -> f64 {
        let (l, m) = self.lame();
        stiffness_norm(l, m)
    }
}

/// Space, materials, boundary conditions and form options of one problem.
#[derive(Clone, Debug)]
pub struct Discretization {
    space: FeSpace,
    materials: Materials,
    boundary: BoundaryConditions,
    options: FormOptions,
    penalties: PenaltyField,
}

impl Discretization {
    pub fn new(
        space: FeSpace,
        materials: Materials,
        boundary: BoundaryConditions,
        options: FormOptions,
    ) -> Result<Self, AssemblyError> {
        if !(0.0..=1.0).contains(&options.delta) {
            return Err(AssemblyError::InvalidDelta(options.delta));
        }
        for (name, value) in [("c1", options.c1), ("c2", options.c2)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(AssemblyError::InvalidPenalty { name, value });
            }
        }
        for el in space.mesh().elements() {
            match el.region {
                Region::Elastic if materials.elastic.is_none() => return Err(AssemblyError::MissingMaterial(Region::Elastic)),
                Region::Poro if materials.poro.is_none() => return Err(AssemblyError::MissingMaterial(Region::Poro)),
                _ => {}
            }
        }
        let penalties = PenaltyField::new(&space, &materials, options.c1, options.c2);
        Ok(Discretization { space, materials, boundary, options, penalties })
    }

    pub fn space(&self) -> &FeSpace {
        &self.space
    }

    pub fn materials(&self) -> &Materials {
        &self.materials
    }

    pub fn boundary(&self) -> &BoundaryConditions {
        &self.boundary
    }

    pub fn options(&self) -> &FormOptions {
        &self.options
    }

    pub fn penalties(&self) -> &PenaltyField {
        &self.penalties
    }

    pub fn ndof(&self) -> usize {
        self.space.ndof()
    }

    pub fn material(&self, element: usize) -> ElementMaterial<'_> {
        match self.space.mesh().element(element).region {
            Region::Elastic => ElementMaterial::Elastic(self.materials.elastic.as_ref().expect("validated")),
            Region::Poro => ElementMaterial::Poro(self.materials.poro.as_ref().expect("validated")),
        }
    }

    /// Condition on a boundary face, `None` for interior and interface faces.
    pub fn face_condition(&self, face: usize) -> Option<BoundaryCondition> {
        self.space.mesh().face(face).boundary_side().map(|s| self.boundary.on(s))
    }

    pub fn has_interface(&self) -> bool {
        self.space.mesh().count_class(FaceClass::Interface) > 0
    }

    pub fn assemble_mass(&self) -> CsrMatrix {
        kernels::assemble_mass(self)
    }

    /// Viscous damping plus absorbing-boundary terms.
    pub fn assemble_damping(&self) -> CsrMatrix {
        kernels::assemble_damping(self)
    }

    /// `A + B` without the interface coupling.
    pub fn assemble_stiffness(&self) -> CsrMatrix {
        kernels::assemble_stiffness(self)
    }

    /// Interface terms `C`.
    pub fn assemble_coupling(&self) -> CsrMatrix {
        kernels::assemble_coupling(self)
    }

    pub fn assemble(&self) -> Result<BlockSystem, AssemblyError> {
        let mass = self.assemble_mass();
        let damping = self.assemble_damping();
        let uncoupled = self.assemble_stiffness();
        let coupling = self.assemble_coupling();
        let stiffness = CsrMatrix::linear_combination(&[(1.0, &uncoupled), (1.0, &coupling)])?;
        Ok(BlockSystem { mass, damping, stiffness, coupling })
    }
}

/// Global matrices over the `(u_e, u_p, u_f)` unknowns.
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub mass: CsrMatrix,
    pub damping: CsrMatrix,
    /// Full `A + B + C`.
    pub stiffness: CsrMatrix,
    /// The interface part `C`, also contained in `stiffness`.
    pub coupling: CsrMatrix,
}

impl BlockSystem {
    pub fn ndof(&self) -> usize {
        self.mass.nrows()
    }

    /// Block of `matrix` coupling test field `row` with trial field `col`.
    pub fn field_block(space: &FeSpace, matrix: &CsrMatrix, row: Field, col: Field) -> CsrMatrix {
        matrix.block(space.dofs().field_range(row), space.dofs().field_range(col))
    }
}
