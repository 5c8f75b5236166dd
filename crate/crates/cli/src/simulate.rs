//! `run <config>`: mesh, assemble, integrate and write the requested outputs.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use polydg_core::assembly::{Discretization, Forcing, PointSourceForcing};
use polydg_core::fespace::FeSpace;
use polydg_core::mesh::{generate_mesh, parse_mesh, Location, PolyMesh};
use polydg_core::receivers::ReceiverRecorder;
use polydg_core::timedg::{run_with, Observer, RunOptions, SlabOperator, State};
use polydg_core::verify::{DampingHistory, ErrorIntegrator, ErrorNorms, ManufacturedForcing};
use serde::Serialize;

use crate::config::{SimulationConfig, SourceConfig, Violations};
use crate::error::CliError;
use crate::output::{write_receiver_csv, SnapshotWriter};

/// Wall time of each phase, in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub mesh: f64,
    pub assembly: f64,
    pub factorization: f64,
    pub stepping: f64,
    pub output: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FinalEnergy {
    pub time: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub dissipated: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub n_elements: usize,
    pub max_diameter: f64,
    pub ndof: usize,
    pub system_nnz: usize,
    pub slabs: usize,
    pub slab_order: usize,
    pub slab_nnz: usize,
    pub condition_estimate: Option<f64>,
    pub final_energy: FinalEnergy,
    /// Errors against the manufactured solution at the final time.
    pub errors: Option<ErrorNorms>,
    pub receiver_files: Vec<PathBuf>,
    pub snapshot_files: Vec<PathBuf>,
    pub timings: Timings,
}

enum Loads {
    None,
    Manufactured(ManufacturedForcing),
    Points(Vec<PointSourceForcing>),
}

impl Forcing for Loads {
    fn add_load(&self, t: f64, out: &mut [f64]) {
        match self {
            Loads::None => {}
            Loads::Manufactured(f) => f.add_load(t, out),
            Loads::Points(points) => points.iter().for_each(|p| p.add_load(t, out)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Loads::None => true,
            Loads::Manufactured(_) => false,
            Loads::Points(points) => points.iter().all(|p| p.is_zero()),
        }
    }
}

/// Loads, validates and runs the configuration at `path`. Relative paths in
/// the file are taken relative to its directory.
pub fn run_file(path: &Path) -> Result<RunReport, CliError> {
    let mut config = SimulationConfig::load(path)?;
    config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
    run_case(&config)
}

pub fn build_mesh(config: &SimulationConfig) -> Result<PolyMesh, CliError> {
    match config.mesh_file() {
        Some(file) => {
            let text = fs::read_to_string(file).map_err(CliError::io(file))?;
            Ok(parse_mesh(&text)?)
        }
        None => Ok(generate_mesh(&config.rectangles(), config.element_count(), config.seed)?),
    }
}

fn check_receivers(config: &SimulationConfig, mesh: &PolyMesh) -> Result<(), CliError> {
    let mut v = Violations::default();
    for (i, r) in config.receivers.iter().enumerate() {
        v.require(
            !matches!(mesh.locate(r.position), Location::Outside),
            &format!("receivers[{i}].position"),
            format!("({}, {}) lies outside the mesh", r.position[0], r.position[1]),
        );
    }
    v.finish()
}

pub fn run_case(config: &SimulationConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let mut timings = Timings::default();
    let clock = Instant::now();
    let mesh = build_mesh(config)?;
    check_receivers(config, &mesh)?;
    let n_elements = mesh.n_elements();
    let max_diameter = mesh.max_diameter();
    timings.mesh = clock.elapsed().as_secs_f64();
    log::info!("mesh: {n_elements} elements, h = {max_diameter:.4e} ({:.2} s)", timings.mesh);

    let clock = Instant::now();
    let (pe, pp) = config.discretization.degrees();
    let space = FeSpace::new(mesh, pe.unwrap_or(1), pp.unwrap_or(1)).map_err(polydg_core::Error::from)?;
    let disc = Discretization::new(space, config.materials()?, config.boundary_conditions(), config.forms)
        .map_err(polydg_core::Error::from)?;
    let system = disc.assemble().map_err(polydg_core::Error::from)?;
    let case = config.manufactured_case();
    let (loads, initial) = if config.is_manufactured() {
        (Loads::Manufactured(case.forcing(&disc)), case.initial_state(&disc))
    } else {
        let points = config
            .sources
            .iter()
            .filter_map(|s| match s {
                SourceConfig::MomentPoint(m) => Some(PointSourceForcing::new(&disc, *m)),
                SourceConfig::Manufactured => None,
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(polydg_core::Error::from)?;
        let loads = if points.is_empty() { Loads::None } else { Loads::Points(points) };
        (loads, State::zero(0.0, disc.ndof()))
    };
    let system_nnz = system.mass.nnz() + system.damping.nnz() + system.stiffness.nnz();
    timings.assembly = clock.elapsed().as_secs_f64();
    log::info!("assembly: {} dofs, {system_nnz} nonzeros in M, D, K ({:.2} s)", disc.ndof(), timings.assembly);

    let d = &config.discretization;
    let options = RunOptions { step: d.step, degree: d.time_degree, final_time: d.final_time, solver: d.solver };
    let clock = Instant::now();
    let op = SlabOperator::with_solver(d.time_degree, d.step, &system.mass, &system.damping, &system.stiffness, d.solver)
        .map_err(polydg_core::Error::from)?;
    let condition_estimate =
        if d.condition_estimate { Some(op.condition_estimate().map_err(polydg_core::Error::from)?) } else { None };
    timings.factorization = clock.elapsed().as_secs_f64();
    log::info!(
        "slab matrix: order {}, {} nonzeros, {:?} solve ({:.2} s){}",
        op.ndof() * op.basis().len(),
        op.nnz(),
        op.solver(),
        timings.factorization,
        condition_estimate.map(|c| format!(", condition estimate {c:.3e}")).unwrap_or_default()
    );

    let out = &config.output;
    let mut recorder = match &out.receiver_dir {
        Some(_) if !config.receivers.is_empty() => Some(
            ReceiverRecorder::new(disc.space(), config.receivers.clone(), out.sampling).map_err(polydg_core::Error::from)?,
        ),
        _ => None,
    };
    let mut snapshots = match (&out.snapshot_dir, out.snapshot_every) {
        (Some(dir), Some(every)) => {
            fs::create_dir_all(dir).map_err(CliError::io(dir))?;
            Some(SnapshotWriter::new(disc.space(), dir, every))
        }
        _ => None,
    };
    let integrator = config.is_manufactured().then(|| ErrorIntegrator::new(&disc));
    let mut history = integrator.as_ref().map(|i| DampingHistory::new(i, &case));

    let clock = Instant::now();
    let summary = {
        let mut observers: Vec<&mut dyn Observer> = Vec::new();
        if let Some(r) = recorder.as_mut() {
            observers.push(r);
        }
        if let Some(s) = snapshots.as_mut() {
            observers.push(s);
        }
        if let Some(h) = history.as_mut() {
            observers.push(h);
        }
        run_with(&op, &system, &loads, initial, options, &mut observers).map_err(polydg_core::Error::from)?
    };
    timings.stepping = clock.elapsed().as_secs_f64();
    log::info!("time stepping: {} slabs ({:.2} s)", summary.slabs, timings.stepping);

    let errors = integrator.as_ref().map(|i| i.errors(&summary.final_state, &case, history.as_ref()));
    if let Some(e) = &errors {
        log::info!("errors at t = {}: L2 {:.4e}, energy {:.4e}", summary.final_state.time, e.l2, e.energy);
    }

    let clock = Instant::now();
    let mut receiver_files = Vec::new();
    if let (Some(dir), Some(recorder)) = (&out.receiver_dir, recorder) {
        fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        for (receiver, trace) in config.receivers.iter().zip(recorder.traces()) {
            let path = dir.join(format!("{}.csv", receiver.name));
            write_to(&path, |w| write_receiver_csv(w, trace))?;
            receiver_files.push(path);
        }
    }
    let snapshot_files = match snapshots {
        Some(s) => s.finish().map_err(|(path, source)| CliError::Io { path, source })?,
        None => Vec::new(),
    };
    let last = summary.energy.last().expect("initial energy is always recorded");
    let mut report = RunReport {
        n_elements,
        max_diameter,
        ndof: disc.ndof(),
        system_nnz,
        slabs: summary.slabs,
        slab_order: summary.slab_order,
        slab_nnz: summary.slab_nnz,
        condition_estimate,
        final_energy: FinalEnergy { time: last.time, kinetic: last.kinetic, potential: last.potential, dissipated: last.dissipated },
        errors,
        receiver_files,
        snapshot_files,
        timings,
    };
    report.timings.output = clock.elapsed().as_secs_f64();
    if let Some(path) = &out.report {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        }
        write_to(path, |w| {
            serde_json::to_writer_pretty(&mut *w, &report).map_err(std::io::Error::from)?;
            writeln!(w)
        })?;
    }
    Ok(report)
}

pub(crate) fn write_to(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(CliError::io(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|()| w.flush()).map_err(CliError::io(path))
}
