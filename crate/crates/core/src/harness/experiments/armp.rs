use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::{cell_seed, elapsed_ms, ExperimentOutcome};
use crate::analysis::theory::iteration_bound;
use crate::baselines::{svt_solve_lowrank, svt_solve_observed, SvtConfig};
use crate::error::{Error, Result};
use crate::harness::fixtures::{logo_truth, lowrank_truth};
use crate::harness::{params, ExperimentConfig, Metric, ResultRow};
use crate::operators::{estimate_isometry_constant, gaussian_ensemble, AffineMap, GaussianEnsemble};
use crate::solver::{svp_solve, svp_solve_observed, SolverConfig, StepPolicy};

/// Largest dense Gaussian ensemble (`d * m * n` entries) an experiment may allocate.
pub const MEMORY_BUDGET: usize = 64 << 20;
/// Relative residual `||A(X) - b|| / ||b||` that counts as solved.
pub const ARMP_TARGET: f64 = 1e-3;
/// Random probes used for the isometry-constant estimate.
const ISOMETRY_PROBES: usize = 200;
/// Iterations allowed beyond the theoretical bound.
const BOUND_SLACK: usize = 5;

fn check_budget(m: usize, n: usize, d: usize) -> Result<()> {
    let needed = GaussianEnsemble::storage(m, n, d);
    if needed > MEMORY_BUDGET {
        return Err(Error::MemoryBudget {
            needed,
            budget: MEMORY_BUDGET,
        });
    }
    Ok(())
}

fn svp_step(cfg: &ExperimentConfig) -> StepPolicy {
    cfg.step_delta.map_or(StepPolicy::ARMP, |delta| StepPolicy::RipDefault { delta })
}

fn rel_residual<A: AffineMap + ?Sized>(map: &A, x: &crate::matrix::LowRankFactorization, b: &[f64]) -> f64 {
    let r: f64 = map.apply_lowrank(x).iter().zip(b).map(|(a, v)| (a - v).powi(2)).sum();
    let bn: f64 = b.iter().map(|v| v * v).sum();
    (r / bn).sqrt()
}

/// Gaussian-ensemble recovery of random rank-`k` matrices with `d = 6 k n`
/// measurements, SVP against SVT, both run to relative residual `1e-3`.
pub fn run_armp_timing(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let mut out = ExperimentOutcome::default();
    for &n in &cfg.sizes {
        for &k in &cfg.ranks {
            let d = cfg.measurements.unwrap_or(6 * k * n);
            check_budget(n, n, d)?;
            let cell = params(&[("n", n.to_string()), ("k", k.to_string()), ("d", d.to_string())]);
            let trials: Vec<Result<ExperimentOutcome>> = (0..cfg.trials)
                .into_par_iter()
                .map(|trial| -> Result<ExperimentOutcome> {
                    let seed = cell_seed(cfg.seed, &[n as u64, k as u64, trial as u64]);
                    let mut g = crate::rng::seeded(seed);
                    let truth = lowrank_truth(n, n, k, &mut g);
                    let map = gaussian_ensemble(n, n, d, g.random())?;
                    let b = map.apply_lowrank(&truth);
                    let b_sq: f64 = b.iter().map(|v| v * v).sum();
                    let eps = ARMP_TARGET * ARMP_TARGET * b_sq;
                    let mut o = ExperimentOutcome::default();
                    let row = |method: &str, metric, value| {
                        ResultRow::new(name, format!("{cell};method={method}"), metric, value, trial, seed)
                    };

                    let start = Instant::now();
                    let solver = SolverConfig::new(k, svp_step(cfg))
                        .with_tolerance(eps)
                        .with_max_iterations(cfg.max_iterations)
                        .with_seed(seed);
                    let (x, trace) = svp_solve(&map, &b, &solver)?;
                    let ms = elapsed_ms(start);
                    let rel = rel_residual(&map, &x, &b);
                    o.rows.push(row("svp", Metric::RelError, rel));
                    o.rows.push(row("svp", Metric::Iterations, trace.iterations() as f64));
                    o.rows.push(row("svp", Metric::WallMs, ms));
                    if !(rel <= ARMP_TARGET) {
                        o.failures.push(format!("{name} [{cell}] trial {trial}: SVP relative residual {rel:.3e}"));
                    }

                    let delta = estimate_isometry_constant(&map, 2 * k, ISOMETRY_PROBES, seed);
                    // the bound is stated for psi = ||A(X) - b||^2 / 2
                    match iteration_bound(b_sq, eps / 2.0, delta) {
                        Some(bound) => {
                            o.rows.push(row("bound", Metric::Iterations, bound as f64));
                            if trace.iterations() > bound + BOUND_SLACK {
                                o.failures.push(format!(
                                    "{name} [{cell}] trial {trial}: {} iterations exceed bound {bound} + {BOUND_SLACK} at estimated delta {delta:.3}",
                                    trace.iterations()
                                ));
                            }
                        }
                        None => o.failures.push(format!(
                            "{name} [{cell}] trial {trial}: estimated delta {delta:.3} gives no iteration bound"
                        )),
                    }

                    let start = Instant::now();
                    let svt_cfg = SvtConfig {
                        tolerance: ARMP_TARGET,
                        max_iterations: cfg.max_iterations,
                        ..SvtConfig::for_completion(n, n, 1.0)
                    };
                    match svt_solve_lowrank(&map, &b, &svt_cfg) {
                        Ok((x, trace)) => {
                            let ms = elapsed_ms(start);
                            o.rows.push(row("svt", Metric::RelError, rel_residual(&map, &x, &b)));
                            o.rows.push(row("svt", Metric::Iterations, trace.iterations() as f64));
                            o.rows.push(row("svt", Metric::WallMs, ms));
                        }
                        Err(e) => log::warn!("{name} [{cell}] trial {trial}: SVT failed: {e}"),
                    }
                    Ok(o)
                })
                .collect();
            for t in trials {
                out.extend(t?);
            }
        }
    }
    Ok(out)
}

/// Recovers the built-in rank-4 logo from `d = 6 k max(m, n)` Gaussian
/// measurements with SVP and SVT, logging the relative reconstruction error
/// of every iterate.
pub fn run_logo_reconstruction(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let truth = logo_truth()?;
    let (m, n) = (truth.rows(), truth.cols());
    let k = cfg.ranks[0];
    let d = cfg.measurements.unwrap_or(6 * k * m.max(n));
    check_budget(m, n, d)?;
    let truth_norm = truth.frobenius_norm();
    let mut out = ExperimentOutcome::default();
    for trial in 0..cfg.trials {
        let seed = cell_seed(cfg.seed, &[trial as u64]);
        let map = gaussian_ensemble(m, n, d, seed)?;
        let b = map.apply_lowrank(&truth);
        let b_sq: f64 = b.iter().map(|v| v * v).sum();
        let cell = params(&[("m", m.to_string()), ("n", n.to_string()), ("k", k.to_string()), ("d", d.to_string())]);
        let row = |method: &str, extra: String, metric, value| {
            ResultRow::new(name, format!("{cell};method={method}{extra}"), metric, value, trial, seed)
        };

        let mut per_iteration = Vec::new();
        let start = Instant::now();
        let solver = SolverConfig::new(k, svp_step(cfg))
            .with_tolerance(1e-12 * b_sq)
            .with_max_iterations(cfg.max_iterations)
            .with_seed(seed);
        let (x, trace) = svp_solve_observed(&map, &b, &solver, |t, x| {
            per_iteration.push((t, x.distance(&truth) / truth_norm));
        })?;
        let ms = elapsed_ms(start);
        let err = x.distance(&truth) / truth_norm;
        for (t, e) in per_iteration {
            out.rows.push(row("svp", format!(";iteration={t}"), Metric::RelError, e));
        }
        out.rows.push(row("svp", String::new(), Metric::RelError, err));
        out.rows.push(row("svp", String::new(), Metric::Iterations, trace.iterations() as f64));
        out.rows.push(row("svp", String::new(), Metric::WallMs, ms));
        if !(err <= ARMP_TARGET) {
            out.failures.push(format!("{name} trial {trial}: SVP reconstruction error {err:.3e}"));
        }

        let mut per_iteration = Vec::new();
        let start = Instant::now();
        let svt_cfg = SvtConfig {
            tolerance: 1e-6,
            max_iterations: cfg.max_iterations,
            ..SvtConfig::for_completion(m, n, 1.0)
        };
        match svt_solve_observed(&map, &b, &svt_cfg, |t, x| {
            per_iteration.push((t, x.distance(&truth) / truth_norm));
        }) {
            Ok((x, trace)) => {
                let ms = elapsed_ms(start);
                for (t, e) in per_iteration {
                    out.rows.push(row("svt", format!(";iteration={t}"), Metric::RelError, e));
                }
                out.rows.push(row("svt", String::new(), Metric::RelError, x.distance(&truth) / truth_norm));
                out.rows.push(row("svt", String::new(), Metric::Iterations, trace.iterations() as f64));
                out.rows.push(row("svt", String::new(), Metric::WallMs, ms));
            }
            Err(e) => log::warn!("{name} trial {trial}: SVT failed: {e}"),
        }
    }
    Ok(out)
}
