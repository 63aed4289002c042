//! Dispatch of a scenario to its methods.

use crate::analytic::{
    dephasing_concurrence, isotropic_white_concurrence, qsba_concurrence,
    transverse_white_concurrence,
};
use crate::error::{Error, Result};
use crate::noise::{decay_functions, Geometry, NoiseKind};
use crate::operators::{bell_state, BellState};
use crate::propagator::{cumulant2_propagator, ensemble_average, heisenberg_concurrence};
use crate::scenario::{Method, Scenario};
use crate::trace::{ConcurrenceTrace, TraceRow};

fn analytic_value(s: &Scenario, state: BellState, t: f64) -> Result<f64> {
    match (s.geometry, s.noise.kind) {
        (Geometry::Dephasing, _) => {
            let d = decay_functions(&s.noise, s.omega, t)?;
            let mean = 0.5 * (d.gamma_auto[0] + d.gamma_auto[1]);
            Ok(dephasing_concurrence(state, mean, d.gamma_cross))
        }
        (Geometry::Isotropic, NoiseKind::White { t_white }) => {
            isotropic_white_concurrence(state, s.gamma(), t_white, t)
        }
        (Geometry::Transverse, NoiseKind::White { t_white }) => {
            transverse_white_concurrence(state, s.gamma(), t_white, t)
        }
        _ => Err(Error::MethodGeometry {
            method: Method::Analytic.name().into(),
            reason: "no closed form for this noise".into(),
        }),
    }
}

fn deterministic_rows(s: &Scenario, method: Method, rows: &mut Vec<TraceRow>) -> Result<()> {
    let times = s.times();
    let mut push = |state, t, c: f64| {
        rows.push(TraceRow {
            t,
            method,
            state,
            concurrence: c,
            stderr: None,
        })
    };
    match method {
        Method::Analytic => {
            for &state in &s.states {
                for &t in &times {
                    push(state, t, analytic_value(s, state, t)?);
                }
            }
        }
        Method::Qsba => {
            let NoiseKind::OrnsteinUhlenbeck { sigma, .. } = s.noise.kind else {
                unreachable!("pairing checked before dispatch")
            };
            let correlated = s.gamma() == 1.0;
            for &state in &s.states {
                for &t in &times {
                    push(
                        state,
                        t,
                        qsba_concurrence(state, correlated, sigma, s.omega, t)?.value,
                    );
                }
            }
        }
        Method::Cumulant2 => {
            let props = times
                .iter()
                .map(|&t| cumulant2_propagator(&s.noise, s.omega, t))
                .collect::<Result<Vec<_>>>()?;
            for &state in &s.states {
                let rho0 = bell_state(state);
                for (u, &t) in props.iter().zip(&times) {
                    let c = heisenberg_concurrence(u, &rho0);
                    if !c.is_finite() {
                        return Err(Error::Numerical(format!(
                            "cumulant concurrence at t = {t} is {c}"
                        )));
                    }
                    push(state, t, c);
                }
            }
        }
        Method::MonteCarlo => unreachable!("stochastic methods are handled separately"),
    }
    Ok(())
}

/// Evaluates every requested method on the scenario grid. Rows are ordered
/// by method as listed, then state, then time.
pub fn run_scenario(s: &Scenario) -> Result<ConcurrenceTrace> {
    s.check_methods()?;
    let mut rows = Vec::new();
    for &method in &s.methods {
        if method.is_stochastic() {
            let ens = ensemble_average(s)?;
            for st in &ens.states {
                for (k, &t) in ens.times.iter().enumerate() {
                    rows.push(TraceRow {
                        t,
                        method,
                        state: st.state,
                        concurrence: st.concurrence[k],
                        stderr: Some(st.stderr[k]),
                    });
                }
            }
        } else {
            deterministic_rows(s, method, &mut rows)?;
        }
    }
    ConcurrenceTrace::new(rows).map_err(|e| Error::Numerical(e.to_string()))
}

/// [`run_scenario`] on a dedicated pool of `threads` workers, or on the
/// global pool when `threads` is `None`. The output does not depend on the
/// worker count.
pub fn run_scenario_with_threads(s: &Scenario, threads: Option<usize>) -> Result<ConcurrenceTrace> {
    match threads {
        None => run_scenario(s),
        Some(0) => Err(Error::InvalidArgument(
            "thread count must be positive".into(),
        )),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("cannot start {n} threads: {e}")))?
            .install(|| run_scenario(s)),
    }
}
