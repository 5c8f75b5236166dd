//! Discontinuous Galerkin time stepping on slabs with Gauss-Lobatto
//! collocation (equivalent to Lobatto IIIC).

mod diag;
mod matrices;
mod run;
mod slab;

use thiserror::Error;

pub use matrices::{TimeBasis, TimeMatrices};
pub use run::{run, run_with, EnergySample, Observer, RunOptions, RunSummary, SlabView};
pub use slab::{SlabOperator, SlabSolution, SlabSolver, State, AUTO_MONOLITHIC_LIMIT};

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum TimeError {
    #[error("time degree {0} is invalid; it must be at least 1")]
    InvalidDegree(usize),
    #[error("time step {0} is invalid")]
    InvalidStep(f64),
    #[error("final time {final_time} is not a multiple of the step {step}")]
    StepMismatch { final_time: f64, step: f64 },
    #[error("state vector of length {found}, expected {expected}")]
    StateSize { expected: usize, found: usize },
    #[error("non-finite solution in slab {slab} (t = {time}); the run is unstable")]
    NonFinite { slab: usize, time: f64 },
    #[error("linear solve failed in slab {slab}: {source}")]
    Solve { slab: usize, source: LinalgError },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
