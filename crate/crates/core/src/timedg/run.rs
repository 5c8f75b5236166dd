use std::time::Instant;

use super::{SlabOperator, SlabSolution, SlabSolver, State, TimeError};
use crate::assembly::{BlockSystem, Forcing};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub step: f64,
    pub degree: usize,
    pub final_time: f64,
    pub solver: SlabSolver,
}

impl RunOptions {
    /// Number of uniform slabs; the step must divide the final time.
    pub fn n_slabs(&self) -> Result<usize, TimeError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(TimeError::InvalidStep(self.step));
        }
        let ratio = self.final_time / self.step;
        let n = ratio.round();
        if !(self.final_time > 0.0) || n < 1.0 || (n * self.step - self.final_time).abs() > 1e-12 * self.final_time.max(1.0) * n.max(1.0) {
            return Err(TimeError::StepMismatch { final_time: self.final_time, step: self.step });
        }
        Ok(n as usize)
    }
}

/// Index and node values of a finished slab.
pub struct SlabView<'s> {
    pub index: usize,
    pub solution: &'s SlabSolution,
}

pub trait Observer {
    fn initial(&mut self, _state: &State) {}
    fn slab(&mut self, view: &SlabView<'_>);
}

/// `½ VᵀMV`, `½ UᵀKU` and the accumulated `∫ VᵀDV` at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergySample {
    pub time: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub dissipated: f64,
}

impl EnergySample {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.dissipated
    }
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub final_state: State,
    pub energy: Vec<EnergySample>,
    pub slabs: usize,
    pub slab_order: usize,
    pub slab_nnz: usize,
    pub factor_seconds: f64,
    pub step_seconds: f64,
}

fn energy(system: &BlockSystem, state: &State, dissipated: f64) -> EnergySample {
    EnergySample {
        time: state.time,
        kinetic: 0.5 * system.mass.bilinear(&state.velocity, &state.velocity),
        potential: 0.5 * system.stiffness.bilinear(&state.displacement, &state.displacement),
        dissipated,
    }
}

/// Integrates `M ü + D u̇ + K u = F` from `initial` over uniform slabs.
pub fn run(
    system: &BlockSystem,
    forcing: &dyn Forcing,
    initial: State,
    options: RunOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary, TimeError> {
    options.n_slabs()?;
    let clock = Instant::now();
    let op = SlabOperator::with_solver(options.degree, options.step, &system.mass, &system.damping, &system.stiffness, options.solver)?;
    let factor_seconds = clock.elapsed().as_secs_f64();
    log::info!(
        "slab matrix: order {}, nnz {}, {:?} solve, factorized in {factor_seconds:.2} s",
        op.ndof() * op.basis().len(),
        op.nnz(),
        op.solver()
    );
    let mut summary = run_with(&op, system, forcing, initial, options, observers)?;
    summary.factor_seconds = factor_seconds;
    Ok(summary)
}

/// As [`run`], with an operator factorized beforehand for `options.step`.
pub fn run_with(
    op: &SlabOperator<'_>,
    system: &BlockSystem,
    forcing: &dyn Forcing,
    initial: State,
    options: RunOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary, TimeError> {
    let slabs = options.n_slabs()?;
    let n = system.ndof();
    for len in [initial.displacement.len(), initial.velocity.len()] {
        if len != n {
            return Err(TimeError::StateSize { expected: n, found: len });
        }
    }
    if op.ndof() != n || op.basis().degree() != options.degree || (op.time_matrices().step - options.step).abs() > 1e-14 * options.step {
        return Err(TimeError::InvalidStep(options.step));
    }
    let factor_seconds = 0.0;
    let clock = Instant::now();
    let mut state = initial;
    let t0 = state.time;
    let mut dissipated = 0.0;
    let mut samples = vec![energy(system, &state, dissipated)];
    for o in observers.iter_mut() {
        o.initial(&state);
    }
    for index in 0..slabs {
        let mut solution = op.advance(&state, forcing);
        // pin the end time to the uniform grid so rounding does not drift
        let end = t0 + (index + 1) as f64 * options.step;
        *solution.times.last_mut().expect("at least two nodes") = end;
        for (w, v) in solution.weights.iter().zip(&solution.velocity) {
            dissipated += w * system.damping.bilinear(v, v);
        }
        state = solution.end_state();
        if !state.is_finite() {
            return Err(TimeError::NonFinite { slab: index, time: state.time });
        }
        samples.push(energy(system, &state, dissipated));
        let view = SlabView { index, solution: &solution };
        for o in observers.iter_mut() {
            o.slab(&view);
        }
    }
    Ok(RunSummary {
        final_state: state,
        energy: samples,
        slabs,
        slab_order: op.ndof() * op.basis().len(),
        slab_nnz: op.nnz(),
        factor_seconds,
        step_seconds: clock.elapsed().as_secs_f64(),
    })
}
