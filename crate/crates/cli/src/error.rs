use std::path::PathBuf;

use thiserror::Error;

use crate::config::Violation;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {message}", .path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid configuration:\n{}", list(.0))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Core(#[from] polydg_core::Error),
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

fn list(violations: &[Violation]) -> String {
    violations.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n")
}

impl From<polydg_core::materials::ParameterError> for CliError {
    fn from(e: polydg_core::materials::ParameterError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<polydg_core::mesh::MeshError> for CliError {
    fn from(e: polydg_core::mesh::MeshError) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// 2 for bad input, 3 for failures during the computation or output.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Invalid(_) | CliError::Usage(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Io { .. } => 3,
        }
    }
}
