//! Configuration files, run orchestration and output formats of the `polydg`
//! command-line tool.

pub mod config;
pub mod error;
pub mod meshing;
pub mod output;
pub mod simulate;
pub mod study;

pub use config::{SimulationConfig, Violation};
pub use error::CliError;
pub use simulate::{run_case, run_file, RunReport};

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "POLYDG_THREADS";

/// Sizes the global thread pool from [`THREADS_VAR`] when it is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR}='{value}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}
