//! Run orchestration: manufactured-solution error sweeps, energy traces and
//! their CSV tables.

mod config;
mod report;

use std::thread;

pub use config::{parse_dt, CaseKind, ErrorNorm, Mode, RunConfig, PAPER_GRID};
pub use report::{
    rates, write_convergence_csv, write_energy_csv, ConvergenceRow, EnergyRow, EnergyTrace,
    ErrorReport,
};

use crate::error::{Error, Result};
use crate::linsolve::{make_solver, EllipticSolver};
use crate::mac::{inner, norm_cell, norm_l2, CellField, Grid, VelocityField};
use crate::mms::{random_divergence_free, CaseId, ManufacturedCase};
use crate::schemes::{
    modified_energy1, modified_energy2, Forcing, Integrator, SchemeKind, SchemeParams, SolverState,
    Unforced,
};

/// Fourier modes per direction in the random stability initial field.
const IC_MODES: usize = 4;

/// Relative size of the energy-law slack.
pub const ENERGY_SLACK: f64 = 1e-8;

#[derive(Clone, Debug)]
pub enum RunReport {
    Errors(ErrorReport),
    Energy(EnergyTrace),
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: SolverState,
    pub report: RunReport,
}

fn manufactured(config: &RunConfig) -> Option<ManufacturedCase> {
    let id = match config.example {
        CaseKind::Example1 => CaseId::Example1,
        CaseKind::Example2 => CaseId::Example2,
        CaseKind::StabilityIc => return None,
    };
    Some(ManufacturedCase::new(id, config.nu))
}

/// Scalar the scheme should track: `exp(-t/T)`, or `sqrt(E(u)+C0)` of the
/// exact velocity for the nonlinear-scalar scheme.
fn reference_scalar(params: &SchemeParams, exact_u: &VelocityField, t: f64) -> f64 {
    match params.scheme {
        SchemeKind::NonlinearScalar => (0.5 * inner(exact_u, exact_u) + params.c0).sqrt(),
        _ => (-t / params.t_final).exp(),
    }
}

fn initial_state(config: &RunConfig, params: &SchemeParams, grid: Grid) -> SolverState {
    let (u, p) = match manufactured(config) {
        Some(case) => case.sample_on_grid(grid, 0.0),
        None => (
            random_divergence_free(grid, config.seed, IC_MODES).scaled(config.ic_scale),
            CellField::zeros(grid),
        ),
    };
    let q = match params.scheme {
        SchemeKind::NonlinearScalar => (0.5 * inner(&u, &u) + params.c0).sqrt(),
        _ => 1.0,
    };
    SolverState::initial(u, p, q)
}

fn check_divergence(step: usize, div_max: f64, bound: f64) -> Result<()> {
    if div_max > bound {
        return Err(Error::Step {
            step,
            source: Box::new(Error::Invariant(format!(
                "max |div u| = {div_max:e} exceeds {bound:e}"
            ))),
        });
    }
    Ok(())
}

/// Runs the first dt of `config` with a freshly built solver.
pub fn run_simulation(config: &RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let solver = make_solver(config.backend, config.grid()?, config.tolerances());
    run_with_solver(config, config.dt[0], solver.as_ref())
}

/// Runs one time step size. Manufactured cases report error norms;
/// the unforced case reports an energy trace.
pub fn run_with_solver(
    config: &RunConfig,
    dt: f64,
    solver: &dyn EllipticSolver,
) -> Result<RunOutcome> {
    let params = config.params(dt);
    params.validate()?;
    let steps = params
        .steps()
        .ok_or_else(|| Error::Config(format!("tfinal / dt is not an integer for dt = {dt}")))?;
    let grid = solver.grid();
    let integrator = Integrator::new(params, solver);
    let bound = params.divergence_bound();
    let mut state = initial_state(config, &params, grid);

    match manufactured(config) {
        Some(case) => {
            let mut report = ErrorReport {
                dt,
                ..ErrorReport::default()
            };
            let (mut p_sq_sum, mut e_u_last, mut e_q_last) = (0.0, 0.0, 0.0);
            for _ in 0..steps {
                let (next, diag) = integrator.step(&state, &case as &dyn Forcing)?;
                check_divergence(next.step, diag.div_max, bound)?;
                let (eu, ep) = case.sample_on_grid(grid, next.t);
                let mut du = next.u.clone();
                du.axpy(-1.0, &eu);
                let mut dp = next.p.clone();
                dp.recenter();
                dp.axpy(-1.0, &ep);
                let ref_q = reference_scalar(&params, &eu, next.t);

                e_u_last = norm_l2(&du);
                e_q_last = (next.q - ref_q).abs();
                report.e_u_linf = report.e_u_linf.max(e_u_last);
                report.e_q_linf = report.e_q_linf.max(e_q_last);
                p_sq_sum += norm_cell(&dp).powi(2);
                report.div_max = report.div_max.max(diag.div_max);
                state = next;
            }
            report.e_p_l2 = (dt * p_sq_sum).sqrt();
            report.e_u_final = e_u_last;
            report.e_q_final = e_q_last;
            Ok(RunOutcome {
                state,
                report: RunReport::Errors(report),
            })
        }
        None => {
            let e0 = modified_energy1(&state, &params);
            let mut trace = EnergyTrace::new(e0, ENERGY_SLACK * e0);
            for _ in 0..steps {
                let bootstrap = state.u_prev.is_none();
                let (next, diag) = integrator.step(&state, &Unforced)?;
                check_divergence(next.step, diag.div_max, bound)?;
                // the bootstrap step of the BDF2 scheme obeys the first-order law
                let (before, after) = if params.scheme == SchemeKind::SecondRotational && bootstrap
                {
                    (
                        modified_energy1(&state, &params),
                        modified_energy1(&next, &params),
                    )
                } else if params.scheme == SchemeKind::SecondRotational {
                    (modified_energy2(&state, &params)?, diag.energy)
                } else {
                    (modified_energy1(&state, &params), diag.energy)
                };
                let dissipation = 2.0 * params.nu * dt * diag.grad_tilde_norm_sq;
                trace.push(EnergyRow {
                    n: next.step,
                    t: next.t,
                    energy: after,
                    dissipation,
                    violation: after - before + dissipation,
                });
                state = next;
            }
            Ok(RunOutcome {
                state,
                report: RunReport::Energy(trace),
            })
        }
    }
}

fn run_all(config: &RunConfig, solver: &dyn EllipticSolver) -> Result<Vec<RunOutcome>> {
    let workers = thread::available_parallelism().map_or(1, |n| n.get());
    if workers <= 1 || config.dt.len() == 1 {
        return config
            .dt
            .iter()
            .map(|&dt| run_with_solver(config, dt, solver))
            .collect();
    }
    let mut out = Vec::with_capacity(config.dt.len());
    for chunk in config.dt.chunks(workers) {
        let results: Vec<Result<RunOutcome>> = thread::scope(|s| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&dt| s.spawn(move || run_with_solver(config, dt, solver)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("dt run panicked"))
                .collect()
        });
        for r in results {
            out.push(r?);
        }
    }
    Ok(out)
}

/// One row per dt with observed rates against the previous (coarser) run.
pub fn convergence_study(config: &RunConfig) -> Result<Vec<ConvergenceRow>> {
    config.validate()?;
    let solver = make_solver(config.backend, config.grid()?, config.tolerances());
    let reports: Vec<ErrorReport> = run_all(config, solver.as_ref())?
        .into_iter()
        .map(|o| match o.report {
            RunReport::Errors(r) => Ok(r),
            RunReport::Energy(_) => Err(Error::Config(
                "convergence study needs a manufactured case".into(),
            )),
        })
        .collect::<Result<_>>()?;
    ConvergenceRow::table(&reports, config.error_norm)
}

/// Energy traces for every dt of the config.
pub fn stability_study(config: &RunConfig) -> Result<Vec<(f64, EnergyTrace)>> {
    config.validate()?;
    let solver = make_solver(config.backend, config.grid()?, config.tolerances());
    run_all(config, solver.as_ref())?
        .into_iter()
        .zip(&config.dt)
        .map(|(o, &dt)| match o.report {
            RunReport::Energy(t) => Ok((dt, t)),
            RunReport::Errors(_) => Err(Error::Config(
                "stability study needs the unforced case".into(),
            )),
        })
        .collect()
}
