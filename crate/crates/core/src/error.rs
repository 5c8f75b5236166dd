use thiserror::Error;

use crate::assembly::AssemblyError;
use crate::fespace::SpaceError;
use crate::linalg::LinalgError;
use crate::materials::ParameterError;
use crate::mesh::MeshError;
use crate::receivers::ReceiverError;
use crate::timedg::TimeError;
use crate::verify::VerifyError;

/// Any failure raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Parameter(#[from] ParameterError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Time(#[from] TimeError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Receiver(#[from] ReceiverError),
}

impl Error {
    /// True for errors caused by invalid user input rather than by a failed
    /// computation.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Mesh(_) | Error::Parameter(_) | Error::Space(_) => true,
            Error::Assembly(e) => e.is_validation(),
            Error::Linalg(_) => false,
            Error::Time(e) => matches!(e, TimeError::InvalidDegree(_) | TimeError::InvalidStep(_) | TimeError::StepMismatch { .. }),
            Error::Verify(_) | Error::Receiver(_) => true,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
