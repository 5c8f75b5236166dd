//! Convergence sweeps on the manufactured case.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::norms::{DampingHistory, ErrorIntegrator, ErrorNorms};
use super::{least_squares_slope, ManufacturedCase, VerifyError};
use crate::timedg::{run_with, Observer, RunOptions, SlabOperator, SlabSolver};

/// Discretization parameter varied by a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Rate in the mesh size, log-log.
    MeshSize,
    /// Rate in the time step, log-log.
    Step,
    /// Decay per unit space degree, semi-log.
    SpaceDegree,
    /// Decay per unit time degree, semi-log.
    TimeDegree,
}

impl SweepAxis {
    fn log_abscissa(self) -> bool {
        matches!(self, SweepAxis::MeshSize | SweepAxis::Step)
    }
}

/// One discretization of the manufactured case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyPoint {
    pub n_elements: usize,
    pub degree: usize,
    pub step: f64,
    pub time_degree: usize,
}

fn default_final_time() -> f64 {
    1.0
}

fn default_penalty() -> f64 {
    10.0
}

fn default_delta() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub axis: SweepAxis,
    pub points: Vec<StudyPoint>,
    #[serde(default = "default_final_time")]
    pub final_time: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_penalty")]
    pub c1: f64,
    #[serde(default = "default_penalty")]
    pub c2: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Estimate the condition number of the slab matrix at each point.
    #[serde(default)]
    pub condition_estimate: bool,
    #[serde(default)]
    pub solver: SlabSolver,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StudyRow {
    pub point: StudyPoint,
    /// Largest element diameter.
    pub h: f64,
    pub ndof: usize,
    pub errors: ErrorNorms,
    pub wall_seconds: f64,
    pub condition: Option<f64>,
    /// Least-squares rate of the tracked error over the rows so far.
    pub slope_so_far: Option<f64>,
}

/// Errors, least-squares rates and pairwise rates of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateTable {
    pub axis: SweepAxis,
    pub rows: Vec<StudyRow>,
    pub l2_slope: f64,
    pub energy_slope: f64,
    pub l2_pairwise: Vec<f64>,
    pub energy_pairwise: Vec<f64>,
    /// False when the error does not decrease along the sweep.
    pub l2_monotone: bool,
    pub energy_monotone: bool,
}

/// Runs one point of a study to the final time and measures its errors.
pub fn run_point(case: &ManufacturedCase, point: StudyPoint, config: &StudyConfig) -> crate::Result<StudyRow> {
    let clock = Instant::now();
    let case = ManufacturedCase { delta: config.delta, ..*case };
    let mesh = ManufacturedCase::mesh(point.n_elements, config.seed)?;
    let h = mesh.max_diameter();
    let disc = case.discretization(mesh, point.degree, config.c1, config.c2)?;
    let system = disc.assemble()?;
    let forcing = case.forcing(&disc);
    let initial = case.initial_state(&disc);
    let options = RunOptions { step: point.step, degree: point.time_degree, final_time: config.final_time, solver: config.solver };
    let op = SlabOperator::with_solver(point.time_degree, point.step, &system.mass, &system.damping, &system.stiffness, config.solver)?;
    let condition = if config.condition_estimate { Some(op.condition_estimate()?) } else { None };
    let integrator = ErrorIntegrator::new(&disc);
    let mut history = DampingHistory::new(&integrator, &case);
    let summary = {
        let mut observers: [&mut dyn Observer; 1] = [&mut history];
        run_with(&op, &system, &forcing, initial, options, &mut observers)?
    };
    let errors = integrator.errors(&summary.final_state, &case, Some(&history));
    let wall_seconds = clock.elapsed().as_secs_f64();
    log::info!(
        "N_el={} p={} dt={} r={}: L2 {:.4e}, energy {:.4e} ({wall_seconds:.1} s)",
        point.n_elements,
        point.degree,
        point.step,
        point.time_degree,
        errors.l2,
        errors.energy
    );
    Ok(StudyRow { point, h, ndof: disc.ndof(), errors, wall_seconds, condition, slope_so_far: None })
}

fn abscissa(axis: SweepAxis, row: &StudyRow) -> f64 {
    match axis {
        SweepAxis::MeshSize => row.h,
        SweepAxis::Step => row.point.step,
        SweepAxis::SpaceDegree => row.point.degree as f64,
        SweepAxis::TimeDegree => row.point.time_degree as f64,
    }
}

/// Rate of `y` in `x`: log-log for size axes, semi-log for degree axes.
fn rate(axis: SweepAxis, x: &[f64], y: &[f64]) -> f64 {
    if axis.log_abscissa() {
        least_squares_slope(x, y)
    } else {
        let ex: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        least_squares_slope(&ex, y)
    }
}

fn pairwise(axis: SweepAxis, x: &[f64], y: &[f64]) -> Vec<f64> {
    (1..x.len()).map(|i| rate(axis, &x[i - 1..=i], &y[i - 1..=i])).collect()
}

fn decreasing(axis: SweepAxis, x: &[f64], y: &[f64]) -> bool {
    // errors should fall as the size shrinks or the degree grows
    let refine = |i: usize| if axis.log_abscissa() { x[i] < x[i - 1] } else { x[i] > x[i - 1] };
    (1..x.len()).all(|i| refine(i) == (y[i] < y[i - 1]))
}

/// Builds the rate table from finished rows.
pub fn rate_table(axis: SweepAxis, mut rows: Vec<StudyRow>) -> Result<RateTable, VerifyError> {
    if rows.len() < 2 {
        return Err(VerifyError::TooFewPoints(rows.len()));
    }
    let x: Vec<f64> = rows.iter().map(|r| abscissa(axis, r)).collect();
    let l2: Vec<f64> = rows.iter().map(|r| r.errors.l2).collect();
    let energy: Vec<f64> = rows.iter().map(|r| r.errors.energy).collect();
    let tracked = if matches!(axis, SweepAxis::Step | SweepAxis::TimeDegree) { &l2 } else { &energy };
    for i in 1..rows.len() {
        rows[i].slope_so_far = Some(rate(axis, &x[..=i], &tracked[..=i]));
    }
    Ok(RateTable {
        axis,
        l2_slope: rate(axis, &x, &l2),
        energy_slope: rate(axis, &x, &energy),
        l2_pairwise: pairwise(axis, &x, &l2),
        energy_pairwise: pairwise(axis, &x, &energy),
        l2_monotone: decreasing(axis, &x, &l2),
        energy_monotone: decreasing(axis, &x, &energy),
        rows,
    })
}

/// Runs every point of `config` in order and fits the rates.
pub fn convergence_study(case: &ManufacturedCase, config: &StudyConfig) -> crate::Result<RateTable> {
    if config.points.len() < 3 {
        return Err(VerifyError::TooFewPoints(config.points.len()).into());
    }
    let rows = config
        .points
        .iter()
        .map(|&p| run_point(case, p, config))
        .collect::<crate::Result<Vec<_>>>()?;
    let table = rate_table(config.axis, rows)?;
    if !table.l2_monotone || !table.energy_monotone {
        log::warn!("error sequence is not monotone; rates are reported but unreliable");
    }
    Ok(table)
}

impl RateTable {
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "h,p,dt,r,l2,energy,slope_so_far,wall_s,cond_est")?;
        for row in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_default();
            writeln!(
                out,
                "{:.6e},{},{:e},{},{:.6e},{:.6e},{},{:.3},{}",
                row.h,
                row.point.degree,
                row.point.step,
                row.point.time_degree,
                row.errors.l2,
                row.errors.energy,
                opt(row.slope_so_far),
                row.wall_seconds,
                opt(row.condition)
            )?;
        }
        Ok(())
    }

    /// Human-readable summary.
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "sweep: {:?}", self.axis);
        let _ = writeln!(s, "{:>5} {:>10} {:>2} {:>9} {:>2} {:>12} {:>12} {:>8}", "N_el", "h", "p", "dt", "r", "L2", "energy", "wall_s");
        for row in &self.rows {
            let _ = writeln!(
                s,
                "{:>5} {:>10.4e} {:>2} {:>9.3e} {:>2} {:>12.4e} {:>12.4e} {:>8.2}",
                row.point.n_elements, row.h, row.point.degree, row.point.step, row.point.time_degree, row.errors.l2, row.errors.energy, row.wall_seconds
            );
        }
        let fmt = |v: &[f64]| v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "L2 rate {:.3} (pairwise {}){}", self.l2_slope, fmt(&self.l2_pairwise), if self.l2_monotone { "" } else { " [non-monotone]" });
        let _ = writeln!(
            s,
            "energy rate {:.3} (pairwise {}){}",
            self.energy_slope,
            fmt(&self.energy_pairwise),
            if self.energy_monotone { "" } else { " [non-monotone]" }
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: usize, h: f64, l2: f64, energy: f64) -> StudyRow {
        StudyRow {
            point: StudyPoint { n_elements: n, degree: 2, step: 0.1, time_degree: 1 },
            h,
            ndof: 0,
            errors: ErrorNorms { l2, energy, ..Default::default() },
            wall_seconds: 0.0,
            condition: None,
            slope_so_far: None,
        }
    }

    #[test]
    fn exact_power_law_rates() {
        let rows = (0..4).map(|i| {
            let h = 0.5f64.powi(i);
            row(10 << i, h, 3.0 * h.powi(3), 2.0 * h * h)
        });
        let t = rate_table(SweepAxis::MeshSize, rows.collect()).unwrap();
        assert!((t.l2_slope - 3.0).abs() < 1e-12);
        assert!((t.energy_slope - 2.0).abs() < 1e-12);
        assert!(t.energy_pairwise.iter().all(|r| (r - 2.0).abs() < 1e-12));
        assert!(t.l2_monotone && t.energy_monotone);
        assert!((t.rows[3].slope_so_far.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_is_flagged() {
        let rows = vec![row(10, 1.0, 1.0, 1.0), row(20, 0.5, 2.0, 0.5), row(40, 0.25, 0.1, 0.25)];
        let t = rate_table(SweepAxis::MeshSize, rows).unwrap();
        assert!(!t.l2_monotone);
        assert!(t.energy_monotone);
        assert!(t.l2_slope.is_finite());
    }

    #[test]
    fn degree_axis_is_semilog() {
        let rows: Vec<StudyRow> = (1..5)
            .map(|p| {
                let mut r = row(100, 0.1, (-1.5 * p as f64).exp(), (-(p as f64)).exp());
                r.point.degree = p;
                r
            })
            .collect();
        let t = rate_table(SweepAxis::SpaceDegree, rows).unwrap();
        assert!((t.l2_slope + 1.5).abs() < 1e-12);
        assert!((t.energy_slope + 1.0).abs() < 1e-12);
        assert!(t.energy_monotone);
    }

    #[test]
    fn too_few_points() {
        let config = StudyConfig {
            axis: SweepAxis::Step,
            points: vec![StudyPoint { n_elements: 10, degree: 1, step: 0.1, time_degree: 1 }; 2],
            final_time: 1.0,
            seed: 0,
            c1: 10.0,
            c2: 10.0,
            delta: 1.0,
            condition_estimate: false,
            solver: SlabSolver::Auto,
        };
        assert!(convergence_study(&ManufacturedCase::new(), &config).is_err());
    }

    #[test]
    fn csv_has_expected_columns() {
        let rows = vec![row(10, 1.0, 1.0, 1.0), row(20, 0.5, 0.25, 0.5)];
        let t = rate_table(SweepAxis::MeshSize, rows).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "h,p,dt,r,l2,energy,slope_so_far,wall_s,cond_est");
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
    }
}
