use std::time::Instant;

use rayon::prelude::*;

use super::completion::completion_step;
use super::{cell_seed, elapsed_ms, ExperimentOutcome};
use crate::baselines::{als_solve, svt_solve_lowrank, AlsConfig, SvtConfig};
use crate::error::{Error, Result};
use crate::harness::fixtures::{completion_instance, rmse, CompletionInstance};
use crate::harness::{params, ExperimentConfig, Metric, NoiseModel, ResultRow};
use crate::solver::{svp_solve_noisy, SolverConfig};

/// Fraction of outlier trials in which SVP must beat SVT.
pub const SVP_WIN_FRACTION: f64 = 0.8;
/// SVP RMSE may be at most this multiple of the ALS RMSE.
pub const ALS_FACTOR: f64 = 2.0;
/// Under Gaussian noise, SVP RMSE may be at most this multiple of the noise deviation.
pub const NOISE_FLOOR_FACTOR: f64 = 2.0;

/// RMSE of each method on one noisy instance; `None` where the method failed.
#[derive(Clone, Copy, Debug)]
pub struct MethodErrors {
    pub svp: f64,
    pub svt: Option<f64>,
    pub als: Option<f64>,
    /// Empirical standard deviation of the added noise.
    pub noise_std: f64,
}

/// Runs SVP, SVT and ALS on one instance. SVT stops once its residual
/// reaches the noise level, since it cannot go lower without fitting noise.
pub fn compare_methods(
    inst: &CompletionInstance,
    k: usize,
    cfg: &ExperimentConfig,
    seed: u64,
    mut row: impl FnMut(&str, Metric, f64),
) -> Result<MethodErrors> {
    let n = inst.truth.rows();
    let p = inst.map.density();
    let noise_std = (inst.noise_energy / inst.observed.len().max(1) as f64).sqrt();

    let start = Instant::now();
    let solver = SolverConfig::new(k, completion_step(cfg))
        .with_tolerance(1e-12 * inst.noise_energy.max(f64::MIN_POSITIVE))
        .with_max_iterations(cfg.max_iterations)
        .with_seed(seed);
    let (x, trace) = svp_solve_noisy(&inst.map, &inst.observed, &solver)?;
    let ms = elapsed_ms(start);
    let svp = rmse(&x, &inst.truth);
    row("svp", Metric::Rmse, svp);
    row("svp", Metric::Iterations, trace.iterations() as f64);
    row("svp", Metric::WallMs, ms);

    let b_norm = inst.observed.iter().map(|v| v * v).sum::<f64>().sqrt();
    let start = Instant::now();
    let svt_cfg = SvtConfig {
        tolerance: (inst.noise_energy.sqrt() / b_norm).max(1e-4),
        max_iterations: cfg.max_iterations,
        ..SvtConfig::for_completion(n, n, p)
    };
    let svt = match svt_solve_lowrank(&inst.map, &inst.observed, &svt_cfg) {
        Ok((x, trace)) => {
            let ms = elapsed_ms(start);
            let e = rmse(&x, &inst.truth);
            row("svt", Metric::Rmse, e);
            row("svt", Metric::Iterations, trace.iterations() as f64);
            row("svt", Metric::WallMs, ms);
            Some(e)
        }
        Err(e) => {
            log::warn!("SVT failed: {e}");
            None
        }
    };

    let start = Instant::now();
    let observed = inst.map.entries_with(&inst.observed)?;
    let als = match als_solve(&observed, &AlsConfig::new(k).with_seed(seed)) {
        Ok((x, trace)) => {
            let ms = elapsed_ms(start);
            let e = rmse(&x, &inst.truth);
            row("als", Metric::Rmse, e);
            row("als", Metric::Iterations, trace.iterations() as f64);
            row("als", Metric::WallMs, ms);
            Some(e)
        }
        Err(e) => {
            log::warn!("ALS failed: {e}");
            None
        }
    };
    Ok(MethodErrors {
        svp,
        svt,
        als,
        noise_std,
    })
}

/// SVP, SVT and ALS on shared noisy completion instances.
///
/// Under outlier noise SVP must beat SVT in 80% of trials and stay within
/// 2x of ALS; under Gaussian noise SVP must stay within twice the noise
/// deviation.
pub fn run_noise_robustness(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let noise = cfg
        .noise
        .ok_or_else(|| Error::Config("noise-robustness needs a noise model".into()))?;
    let mut out = ExperimentOutcome::default();
    for &n in &cfg.sizes {
        for &k in &cfg.ranks {
            for &p in &cfg.densities {
                let cell = params(&[("n", n.to_string()), ("k", k.to_string()), ("p", p.to_string())]);
                let trials: Vec<Result<(ExperimentOutcome, MethodErrors)>> = (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let seed = cell_seed(cfg.seed, &[n as u64, k as u64, p.to_bits(), trial as u64]);
                        let inst = completion_instance(n, k, p, cfg.mu, Some(&noise), seed, seed ^ 1)?;
                        let mut o = ExperimentOutcome::default();
                        let errors = compare_methods(&inst, k, cfg, seed, |method, metric, value| {
                            o.rows.push(ResultRow::new(name, format!("{cell};method={method}"), metric, value, trial, seed));
                        })?;
                        Ok((o, errors))
                    })
                    .collect();
                let mut wins = 0;
                for (trial, t) in trials.into_iter().enumerate() {
                    let (o, e) = t?;
                    out.extend(o);
                    if e.svt.is_none_or(|svt| e.svp < svt) {
                        wins += 1;
                    }
                    match noise {
                        NoiseModel::Outlier { .. } => match e.als {
                            Some(als) if e.svp > ALS_FACTOR * als => out.failures.push(format!(
                                "{name} [{cell}] trial {trial}: SVP RMSE {:.3e} above {ALS_FACTOR}x ALS {als:.3e}",
                                e.svp
                            )),
                            _ => {}
                        },
                        NoiseModel::Gaussian { .. } => {
                            if e.svp > NOISE_FLOOR_FACTOR * e.noise_std {
                                out.failures.push(format!(
                                    "{name} [{cell}] trial {trial}: SVP RMSE {:.3e} above {NOISE_FLOOR_FACTOR}x noise deviation {:.3e}",
                                    e.svp, e.noise_std
                                ));
                            }
                        }
                    }
                }
                if matches!(noise, NoiseModel::Outlier { .. }) {
                    let needed = (SVP_WIN_FRACTION * cfg.trials as f64).ceil() as usize;
                    if wins < needed {
                        out.failures.push(format!(
                            "{name} [{cell}]: SVP beat SVT in {wins}/{} trials, need {needed}",
                            cfg.trials
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}
