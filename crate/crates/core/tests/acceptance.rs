//! Acceptance criteria at their pinned tolerances. Prints one PASS/FAIL line
//! per criterion and exits non-zero if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use polydg_core::assembly::{BoundaryCondition, BoundaryConditions, FormOptions, NoForcing};
use polydg_core::fespace::Field;
use polydg_core::materials::{ElasticParams, Materials};
use polydg_core::receivers::{ReceiverRecorder, Sampling};
use polydg_core::timedg::{run, RunOptions, SlabSolver, State, TimeMatrices};
use polydg_core::verify::{
    convergence_study, distance, pick_arrival, rate_table, run_point, LinearPatch, ManufacturedCase, PulseTable,
    StudyConfig, StudyPoint, SweepAxis, TwoLayerCase,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn study_config(axis: SweepAxis, points: Vec<StudyPoint>) -> StudyConfig {
    StudyConfig {
        axis,
        points,
        final_time: 1.0,
        seed: 0,
        c1: 10.0,
        c2: 10.0,
        delta: 1.0,
        condition_estimate: false,
        solver: SlabSolver::Auto,
    }
}

fn absorbing() -> BoundaryConditions {
    BoundaryConditions { top: BoundaryCondition::FreeSurface, ..BoundaryConditions::uniform(BoundaryCondition::Absorbing) }
}

fn damped_materials(zeta: f64, drag: f64) -> Materials {
    let mut p = poro();
    p.viscosity = drag;
    p.damping = zeta;
    Materials::new(Some(ElasticParams { damping: zeta, ..elastic() }), Some(p)).expect("materials")
}

fn spatial_convergence() -> Outcome {
    let case = ManufacturedCase::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for degree in [2, 3] {
        let points = [50, 100, 200, 400]
            .iter()
            .map(|&n| StudyPoint { n_elements: n, degree, step: 1e-3, time_degree: 1 })
            .collect();
        let table = convergence_study(&case, &study_config(SweepAxis::MeshSize, points)).map_err(fail)?;
        let (lo, hi) = (degree as f64 - 0.35, degree as f64 + 0.6);
        ok &= (lo..=hi).contains(&table.energy_slope);
        lines.push(format!("p={degree} energy slope {:.3} in [{lo:.2}, {hi:.2}]", table.energy_slope));
    }
    check(ok, lines.join("; "))
}

fn temporal_convergence() -> Outcome {
    let case = ManufacturedCase::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for time_degree in [1, 2] {
        let config = study_config(SweepAxis::Step, Vec::new());
        let rows = [0.1, 0.05, 0.025, 0.0125]
            .iter()
            .map(|&step| run_point(&case, StudyPoint { n_elements: 100, degree: 5, step, time_degree }, &config))
            .collect::<Result<Vec<_>, _>>()
            .map_err(fail)?;
        let table = rate_table(SweepAxis::Step, rows).map_err(fail)?;
        let bound = time_degree as f64 - 0.2;
        ok &= table.l2_slope >= bound;
        lines.push(format!("r={time_degree} L2 slope {:.3} >= {bound:.1}", table.l2_slope));
    }
    check(ok, lines.join("; "))
}

fn tableau() -> Outcome {
    let mut worst = 0.0f64;
    for r in [1, 2] {
        for step in [1.0, 0.1, 1e-3] {
            let a = TimeMatrices::build(r, step).map_err(fail)?.butcher();
            for (i, row) in lobatto_iiic(r + 1).iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    worst = worst.max((a[(i, j)] - v).abs());
                }
            }
        }
    }
    check(worst <= 1e-13, format!("max deviation from Lobatto IIIC {worst:.2e}"))
}

fn operator_structure() -> Outcome {
    let mut worst_mass = f64::INFINITY;
    let mut worst_damping = 0.0f64;
    let mut worst_symmetry = 0.0f64;
    let mut worst_stiffness = 0.0f64;
    let mut systems = 0;
    for (n, seed) in [(8, 1), (24, 2), (50, 3)] {
        for degree in [1, 2] {
            for delta in [0.0, 0.5, 1.0] {
                for boundary in [BoundaryConditions::default(), absorbing()] {
                    let options = FormOptions { c1: 10.0, c2: 10.0, delta };
                    let disc = discretize(coupled_mesh(n, seed), degree, damped_materials(0.2, 0.3), boundary, options);
                    let system = disc.assemble().map_err(fail)?;
                    let (mass_lo, mass_hi) = eigen_range(&system.mass);
                    worst_mass = worst_mass.min(mass_lo / mass_hi);
                    let (damping_lo, damping_hi) = eigen_range(&system.damping);
                    worst_damping = worst_damping.min(damping_lo / damping_hi);
                    for m in [&system.mass, &system.damping, &system.stiffness] {
                        worst_symmetry = worst_symmetry.max(m.symmetry_defect() / m.max_abs());
                    }
                    let norm = spectral_norm(&system.stiffness);
                    let (stiffness_lo, _) = eigen_range(&system.stiffness);
                    worst_stiffness = worst_stiffness.min(stiffness_lo / norm);
                    systems += 1;
                }
            }
        }
    }
    let ok = worst_mass > 0.0 && worst_damping >= -1e-12 && worst_symmetry <= 1e-12 && worst_stiffness >= -1e-10;
    check(
        ok,
        format!(
            "{systems} systems: min λ(M)/max {worst_mass:.2e}, min λ(D)/max {worst_damping:.2e}, \
             symmetry {worst_symmetry:.2e}, min λ(K)/‖K‖ {worst_stiffness:.2e}"
        ),
    )
}

fn coupling_symmetry() -> Outcome {
    let mut worst = 0.0f64;
    for delta in [0.0, 0.5, 1.0] {
        let options = FormOptions { delta, ..FormOptions::default() };
        let disc = discretize(coupled_mesh(40, 5), 2, damped_materials(0.0, 0.3), BoundaryConditions::default(), options);
        let coupling = disc.assemble().map_err(fail)?.coupling;
        for seed in 0..5 {
            let (u, w) = (random_vector(disc.ndof(), 2 * seed), random_vector(disc.ndof(), 2 * seed + 1));
            let (uw, wu) = (coupling.bilinear(&u, &w), coupling.bilinear(&w, &u));
            if uw == 0.0 {
                return Err(format!("delta {delta}: coupling vanishes"));
            }
            worst = worst.max((uw - wu).abs() / uw.abs());
        }
    }
    check(worst <= 1e-12, format!("max relative asymmetry {worst:.2e}"))
}

fn energy_stability() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    let runs = [
        ("dirichlet", BoundaryConditions::default(), 0.0, 0.0, 1),
        ("dirichlet damped", BoundaryConditions::default(), 0.3, 0.5, 2),
        ("absorbing", absorbing(), 0.0, 0.0, 2),
        ("absorbing damped", absorbing(), 0.1, 0.3, 3),
    ];
    for (label, boundary, zeta, drag, r) in runs {
        let disc = discretize(coupled_mesh(24, 11), 2, damped_materials(zeta, drag), boundary, FormOptions::default());
        let system = disc.assemble().map_err(fail)?;
        let n = disc.ndof();
        let mut initial = State::zero(0.0, n);
        let bump = |x: [f64; 2]| {
            let g = (-40.0 * ((x[0] - 0.45).powi(2) + (x[1] - 0.5).powi(2))).exp();
            [g, -0.5 * g]
        };
        for field in Field::ALL {
            disc.space().project_into(field, bump, &mut initial.displacement);
        }
        initial.velocity = random_vector(n, 3).iter().map(|v| 0.1 * v).collect();
        let options = RunOptions { step: 0.02, degree: r, final_time: 1.0, solver: SlabSolver::Auto };
        let summary = run(&system, &NoForcing, initial, options, &mut []).map_err(fail)?;
        let energy: Vec<f64> = summary.energy.iter().map(|e| e.kinetic + e.potential).collect();
        let growth = energy.windows(2).map(|w| (w[1] - w[0]) / w[0]).fold(f64::NEG_INFINITY, f64::max);
        ok &= growth <= 1e-10;
        lines.push(format!("{label} max step growth {growth:.1e}"));
    }
    check(ok, lines.join("; "))
}

fn table_two_magnitude() -> Outcome {
    let reference = 1.7814e-4;
    let config = study_config(SweepAxis::MeshSize, Vec::new());
    let point = StudyPoint { n_elements: 400, degree: 3, step: 0.01, time_degree: 3 };
    let row = run_point(&ManufacturedCase::new(), point, &config).map_err(fail)?;
    let ratio = row.errors.l2 / reference;
    check((1.0 / 30.0..=30.0).contains(&ratio), format!("L2 {:.4e}, {ratio:.2}x the reference", row.errors.l2))
}

fn two_layer_arrival() -> Outcome {
    let case = TwoLayerCase::new(false);
    let poro = case.materials().map_err(fail)?.poro.ok_or("no poro-elastic material")?;
    let (params, derived) = (case.poro, poro.derived);
    let (m, beta, rf) = (params.biot_modulus, params.biot_coefficient, params.fluid_density);
    let rho = [[derived.bulk_density, rf], [rf, derived.apparent_fluid_density]];
    let k = [[params.lambda + 2.0 * params.mu + m * beta * beta, m * beta], [m * beta, m]];
    let (fast, slow) = brute_force_speeds(rho, k);
    let speed_error = ((derived.fast_p_speed - fast).abs() / fast).max((derived.slow_p_speed - slow).abs() / slow);

    let (step, final_time) = (0.005, 0.7);
    let disc = case.discretization(case.mesh(200.0, 1).map_err(fail)?, 2).map_err(fail)?;
    let system = disc.assemble().map_err(fail)?;
    let forcing = case.forcing(&disc).map_err(fail)?;
    let receiver = case.receivers[0].clone();
    let mut recorder =
        ReceiverRecorder::new(disc.space(), vec![receiver.clone()], Sampling::AllNodes).map_err(fail)?;
    let options = RunOptions { step, degree: 2, final_time, solver: SlabSolver::Auto };
    run(&system, &forcing, State::zero(0.0, disc.ndof()), options, &mut [&mut recorder]).map_err(fail)?;

    let (source, at) = (case.source.position, receiver.position);
    let d = distance(source, at);
    let direction = [(at[0] - source[0]) / d, (at[1] - source[1]) / d];
    let trace = &recorder.traces()[0];
    let times: Vec<f64> = trace.iter().map(|s| s.time).collect();
    let radial = trace
        .iter()
        .map(|s| s.field(Field::Solid).map(|f| f.velocity[0] * direction[0] + f.velocity[1] * direction[1]))
        .collect::<Option<Vec<f64>>>()
        .ok_or("receiver is not in the poro-elastic layer")?;
    // stop halfway between the direct wave and its reflection off the interface
    let image = [source[0], 2.0 * case.interface - source[1]];
    let window_end = case.source.delay + 0.5 * (d + distance(image, at)) / derived.fast_p_speed;
    let table = PulseTable::new(d, derived.fast_p_speed, case.source.peak_frequency, case.source.delay, final_time + 1.0, 1e-4);
    let pick = pick_arrival(&times, &radial, (0.0, window_end), d / derived.fast_p_speed, |t| table.eval(t));
    let error = pick.relative_error();
    check(
        speed_error <= 1e-12 && error <= 0.1,
        format!(
            "c_pI {:.2} m/s (oracle deviation {speed_error:.1e}); travel time {:.4} s vs {:.4} s, \
             error {:.1}%, correlation {:.3}",
            derived.fast_p_speed,
            pick.measured,
            pick.expected,
            100.0 * error,
            pick.correlation
        ),
    )
}

fn patch_test() -> Outcome {
    let mut worst = 0.0f64;
    for delta in [0.0, 1.0] {
        for (n, degree, seed) in [(12, 1, 4), (40, 2, 7)] {
            let result = LinearPatch::new(delta).residual(n, degree, seed).map_err(fail)?;
            worst = worst.max(result.residual);
        }
    }
    check(worst <= 1e-10, format!("max static residual {worst:.2e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("spatial convergence", spatial_convergence),
        ("temporal convergence", temporal_convergence),
        ("Lobatto IIIC tableau", tableau),
        ("operator structure", operator_structure),
        ("coupling symmetry", coupling_symmetry),
        ("energy stability", energy_stability),
        ("manufactured error magnitude", table_two_magnitude),
        ("two-layer first arrival", two_layer_arrival),
        ("patch test", patch_test),
    ];
    let mut failed = 0;
    for (index, (name, criterion)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = std::panic::catch_unwind(criterion).unwrap_or_else(|_| Err("panicked".into()));
        let seconds = clock.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(detail) => ("PASS", detail),
            Err(detail) => {
                failed += 1;
                ("FAIL", detail)
            }
        };
        println!("{tag} {}. {name}: {detail} ({seconds:.0} s)", index + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
