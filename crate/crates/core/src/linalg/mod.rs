//! Sparse storage, Kronecker slab operators, direct solves and condition
//! estimation.

mod condest;
pub mod dense;
mod kron;
mod mm;
mod solver;
mod sparse;

use thiserror::Error;

pub use condest::{condest_1norm, estimate_condition, inverse_norm1};
pub use dense::DenseMatrix;
pub use kron::{kron_assemble, kron_matvec};
pub use mm::write_matrix_market;
pub use solver::{relative_residual, ComplexSparseLu, SparseLu};
pub use sparse::{CsrMatrix, TripletBuilder};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular (zero pivot at step {index})")]
    Singular { index: usize },
    #[error("matrix is singular to working precision (relative residual {residual:e})")]
    NumericallySingular { residual: f64 },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("Kronecker assembly needs at least two time nodes")]
    TimeDegree,
}
