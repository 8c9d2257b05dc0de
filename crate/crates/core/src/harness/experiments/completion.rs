use std::time::Instant;

use rayon::prelude::*;

use super::{cell_seed, elapsed_ms, ExperimentOutcome};
use crate::baselines::{svt_solve_lowrank, SvtConfig};
use crate::error::{Error, Result};
use crate::harness::fixtures::{completion_instance, rmse};
use crate::harness::{params, ExperimentConfig, Metric, ResultRow};
use crate::solver::{svp_complete, SolverConfig, StepPolicy};

/// Relative residual at which both solvers stop.
pub const COMPLETION_TARGET: f64 = 1e-4;
/// RMSE over all entries that counts as recovered.
pub const RECOVERY_RMSE: f64 = 1e-2;

pub(crate) fn completion_step(cfg: &ExperimentConfig) -> StepPolicy {
    cfg.step_delta
        .map_or(StepPolicy::COMPLETION, |delta| StepPolicy::CompletionDefault { delta })
}

/// SVP against SVT on shared noiseless completion instances. Wall time is
/// compared as an ordering: mean SVP time must beat mean SVT time per cell.
pub fn run_completion_timing(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let mut out = ExperimentOutcome::default();
    for &n in &cfg.sizes {
        for &k in &cfg.ranks {
            for &p in &cfg.densities {
                let cell = params(&[("n", n.to_string()), ("k", k.to_string()), ("p", p.to_string())]);
                let trials: Vec<Result<(ExperimentOutcome, Option<f64>, Option<f64>)>> = (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let seed = cell_seed(cfg.seed, &[n as u64, k as u64, p.to_bits(), trial as u64]);
                        let inst = completion_instance(n, k, p, cfg.mu, None, seed, seed ^ 1)?;
                        let b_sq: f64 = inst.observed.iter().map(|v| v * v).sum();
                        let mut o = ExperimentOutcome::default();
                        let row = |method: &str, metric, value| {
                            ResultRow::new(name, format!("{cell};method={method}"), metric, value, trial, seed)
                        };

                        let start = Instant::now();
                        let solver = SolverConfig::new(k, completion_step(cfg))
                            .with_tolerance(COMPLETION_TARGET * COMPLETION_TARGET * b_sq)
                            .with_max_iterations(cfg.max_iterations)
                            .with_seed(seed);
                        let svp_ms = match svp_complete(&inst.map, &inst.observed, &solver) {
                            Ok((x, trace)) => {
                                let ms = elapsed_ms(start);
                                let err = rmse(&x, &inst.truth);
                                o.rows.push(row("svp", Metric::Rmse, err));
                                o.rows.push(row("svp", Metric::Iterations, trace.iterations() as f64));
                                o.rows.push(row("svp", Metric::WallMs, ms));
                                if !(err <= RECOVERY_RMSE) {
                                    o.failures.push(format!("{name} [{cell}] trial {trial}: SVP RMSE {err:.3e}"));
                                }
                                Some(ms)
                            }
                            Err(Error::NonFinite(_)) => {
                                o.failures.push(format!("{name} [{cell}] trial {trial}: SVP diverged"));
                                None
                            }
                            Err(e) => return Err(e),
                        };

                        let start = Instant::now();
                        let svt_cfg = SvtConfig {
                            tolerance: COMPLETION_TARGET,
                            max_iterations: cfg.max_iterations,
                            ..SvtConfig::for_completion(n, n, p)
                        };
                        let svt_ms = match svt_solve_lowrank(&inst.map, &inst.observed, &svt_cfg) {
                            Ok((x, trace)) => {
                                let ms = elapsed_ms(start);
                                o.rows.push(row("svt", Metric::Rmse, rmse(&x, &inst.truth)));
                                o.rows.push(row("svt", Metric::Iterations, trace.iterations() as f64));
                                o.rows.push(row("svt", Metric::WallMs, ms));
                                Some(ms)
                            }
                            Err(e) => {
                                log::warn!("{name} [{cell}] trial {trial}: SVT failed: {e}");
                                None
                            }
                        };
                        Ok((o, svp_ms, svt_ms))
                    })
                    .collect();
                let (mut svp_total, mut svt_total, mut paired) = (0.0, 0.0, 0usize);
                for t in trials {
                    let (o, svp_ms, svt_ms) = t?;
                    out.extend(o);
                    if let (Some(svp_ms), Some(svt_ms)) = (svp_ms, svt_ms) {
                        svp_total += svp_ms;
                        svt_total += svt_ms;
                        paired += 1;
                    }
                }
                if paired > 0 && svp_total >= svt_total {
                    out.failures.push(format!(
                        "{name} [{cell}]: mean SVP time {:.1} ms not below SVT {:.1} ms",
                        svp_total / paired as f64,
                        svt_total / paired as f64
                    ));
                }
            }
        }
    }
    Ok(out)
}
