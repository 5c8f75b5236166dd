use std::ops::Range;

use super::basis::scalar_dim;
use super::SpaceError;
use crate::mesh::{PolyMesh, Region};

/// The three displacement unknowns, in global block order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    /// Elastic displacement u_e.
    Elastic,
    /// Poro-elastic solid displacement u_p.
    Solid,
    /// Filtration displacement u_f.
    Filtration,
}

impl Field {
    pub const ALL: [Field; 3] = [Field::Elastic, Field::Solid, Field::Filtration];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn region(self) -> Region {
        match self {
            Field::Elastic => Region::Elastic,
            Field::Solid | Field::Filtration => Region::Poro,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Field::Elastic => "u_e",
            Field::Solid => "u_p",
            Field::Filtration => "u_f",
        }
    }
}

/// Global numbering of the vector-valued modal coefficients.
///
/// Inside an element block the local index of mode `i`, component `c` is
/// `c * n_modes + i`.
#[derive(Clone, Debug)]
pub struct DofMap {
    degrees: Vec<usize>,
    offsets: [Vec<Option<usize>>; 3],
    field_ranges: [Range<usize>; 3],
    ndof: usize,
}

impl DofMap {
    pub fn new(mesh: &PolyMesh, degrees: Vec<usize>) -> Result<Self, SpaceError> {
        if let Some(element) = degrees.iter().position(|&p| p == 0) {
            return Err(SpaceError::ZeroDegree { element });
        }
        if degrees.len() != mesh.n_elements() {
            return Err(SpaceError::DegreeCount { expected: mesh.n_elements(), found: degrees.len() });
        }
        let n = mesh.n_elements();
        let mut offsets: [Vec<Option<usize>>; 3] = [vec![None; n], vec![None; n], vec![None; n]];
        let mut next = 0;
        let mut field_ranges = [0..0, 0..0, 0..0];
        for field in Field::ALL {
            let start = next;
            for (id, el) in mesh.elements().iter().enumerate() {
                if el.region == field.region() {
                    offsets[field.index()][id] = Some(next);
                    next += 2 * scalar_dim(degrees[id]);
                }
            }
            field_ranges[field.index()] = start..next;
        }
        Ok(DofMap { degrees, offsets, field_ranges, ndof: next })
    }

    pub fn uniform(mesh: &PolyMesh, degree_elastic: usize, degree_poro: usize) -> Result<Self, SpaceError> {
        let degrees = mesh
            .elements()
            .iter()
            .map(|e| match e.region {
                Region::Elastic => degree_elastic,
                Region::Poro => degree_poro,
            })
            .collect();
        Self::new(mesh, degrees)
    }

    pub fn ndof(&self) -> usize {
        self.ndof
    }

    pub fn degree(&self, element: usize) -> usize {
        self.degrees[element]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn n_modes(&self, element: usize) -> usize {
        scalar_dim(self.degrees[element])
    }

    /// First global index of the element block of `field`, if the field lives
    /// on that element.
    pub fn offset(&self, field: Field, element: usize) -> Option<usize> {
        self.offsets[field.index()][element]
    }

    /// Global index range of the element block of `field`.
    pub fn block(&self, field: Field, element: usize) -> Option<Range<usize>> {
        self.offset(field, element).map(|o| o..o + 2 * self.n_modes(element))
    }

    pub fn field_range(&self, field: Field) -> Range<usize> {
        self.field_ranges[field.index()].clone()
    }

    pub fn field_ndof(&self, field: Field) -> usize {
        self.field_ranges[field.index()].len()
    }

    /// Fields that live on `element`.
    pub fn fields_on(&self, element: usize) -> impl Iterator<Item = Field> + '_ {
        Field::ALL.into_iter().filter(move |f| self.offsets[f.index()][element].is_some())
    }
}
