//! Manufactured solutions, error norms and convergence studies.

mod layered;
mod manufactured;
mod norms;
mod patch;
mod study;

use thiserror::Error;

pub use layered::{cylindrical_pulse, distance, pick_arrival, ricker_second_derivative, ArrivalPick, PulseTable, TwoLayerCase};
pub use manufactured::{ManufacturedCase, ManufacturedForcing};
pub use norms::{DampingHistory, ErrorIntegrator, ErrorNorms};
pub use patch::{LinearPatch, PatchResult};
pub use study::{convergence_study, rate_table, run_point, RateTable, StudyConfig, StudyPoint, StudyRow, SweepAxis};

use crate::fespace::Field;
use crate::geometry::Point;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("a convergence study needs at least 3 points, got {0}")]
    TooFewPoints(usize),
}

/// Closed-form displacement fields.
pub trait ExactSolution: Sync {
    fn displacement(&self, field: Field, x: Point, t: f64) -> [f64; 2];
    fn velocity(&self, field: Field, x: Point, t: f64) -> [f64; 2];
    /// `grad[c][k] = ∂u_c / ∂x_k`.
    fn gradient(&self, field: Field, x: Point, t: f64) -> [[f64; 2]; 2];
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
