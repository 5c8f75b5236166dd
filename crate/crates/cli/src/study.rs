//! `verify <study-config>`: convergence studies on the manufactured solution.

use std::path::Path;

use polydg_core::verify::{convergence_study, ManufacturedCase, RateTable, StudyConfig};

use crate::config::{load_file, Violations};
use crate::error::CliError;
use crate::simulate::write_to;

pub fn validate_study(config: &StudyConfig) -> Result<(), CliError> {
    let mut v = Violations::default();
    v.require(config.points.len() >= 3, "points", "a study needs at least three points");
    v.require(config.final_time > 0.0, "final_time", "must be positive");
    v.require((0.0..=1.0).contains(&config.delta), "delta", format!("{} is outside [0, 1]", config.delta));
    v.require(config.c1 > 0.0, "c1", "must be positive");
    v.require(config.c2 > 0.0, "c2", "must be positive");
    for (i, p) in config.points.iter().enumerate() {
        let field = |name: &str| format!("points[{i}].{name}");
        v.require(p.n_elements >= 2, &field("n_elements"), "must be at least 2");
        v.require(p.degree >= 1, &field("degree"), "must be at least 1");
        v.require(p.time_degree >= 1, &field("time_degree"), "must be at least 1");
        v.require(p.step > 0.0, &field("step"), "must be positive");
        if p.step > 0.0 && config.final_time > 0.0 {
            let slabs = (config.final_time / p.step).round();
            v.require(
                slabs >= 1.0 && (slabs * p.step - config.final_time).abs() <= 1e-12 * config.final_time,
                &field("step"),
                format!("must divide final_time {}", config.final_time),
            );
        }
    }
    v.finish()
}

pub fn run_study(config: &StudyConfig) -> Result<RateTable, CliError> {
    validate_study(config)?;
    Ok(convergence_study(&ManufacturedCase::new(), config)?)
}

/// Runs the study in `path` and writes the optional CSV and JSON tables.
pub fn verify_file(path: &Path, csv: Option<&Path>, json: Option<&Path>) -> Result<RateTable, CliError> {
    let config: StudyConfig = load_file(path)?;
    let table = run_study(&config)?;
    if let Some(csv) = csv {
        write_to(csv, |w| table.write_csv(w))?;
    }
    if let Some(json) = json {
        write_to(json, |w| serde_json::to_writer_pretty(w, &table).map_err(std::io::Error::from))?;
    }
    Ok(table)
}
