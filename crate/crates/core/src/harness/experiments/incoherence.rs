use rayon::prelude::*;

use super::completion::completion_step;
use super::{cell_seed, ExperimentOutcome};
use crate::analysis::incoherence;
use crate::error::Result;
use crate::harness::fixtures::completion_instance;
use crate::harness::{params, ExperimentConfig, Metric, ResultRow};
use crate::solver::{svp_complete, PlateauRule, SolverConfig};

/// Allowed growth of `max_t mu(X^t)` over `mu(X*)`.
pub const INCOHERENCE_CAP: f64 = 3.0;

/// Tracks `max_t sqrt(n) max |U^t_ij|` over SVP iterates on random
/// incoherent truths, for every `(n, p)`; each run must stay within
/// `INCOHERENCE_CAP` times the truth's own value.
pub fn run_incoherence_trace(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let mut out = ExperimentOutcome::default();
    for &n in &cfg.sizes {
        for &k in &cfg.ranks {
            for &p in &cfg.densities {
                let cell = params(&[("n", n.to_string()), ("k", k.to_string()), ("p", p.to_string())]);
                let runs: Vec<Result<(f64, f64, u64)>> = (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| {
                        let seed = cell_seed(cfg.seed, &[n as u64, k as u64, p.to_bits(), trial as u64]);
                        let inst = completion_instance(n, k, p, cfg.mu, None, seed, seed ^ 1)?;
                        let mu_star = incoherence(&inst.truth, n, n)?.mu_left;
                        let b_sq: f64 = inst.observed.iter().map(|v| v * v).sum();
                        let solver = SolverConfig::new(k, completion_step(cfg))
                            .with_tolerance(1e-12 * b_sq)
                            .with_max_iterations(cfg.max_iterations)
                            .with_plateau(PlateauRule::default())
                            .with_incoherence()
                            .with_seed(seed);
                        let (_, trace) = svp_complete(&inst.map, &inst.observed, &solver)?;
                        Ok((trace.max_mu_left().unwrap_or(0.0), mu_star, seed))
                    })
                    .collect();
                for (trial, r) in runs.into_iter().enumerate() {
                    let (max_mu, mu_star, seed) = r?;
                    out.rows.push(ResultRow::new(name, cell.clone(), Metric::MaxIncoherence, max_mu, trial, seed));
                    if max_mu > INCOHERENCE_CAP * mu_star {
                        out.failures.push(format!(
                            "{name} [{cell}] trial {trial}: max incoherence {max_mu:.3} above {INCOHERENCE_CAP} x {mu_star:.3}"
                        ));
                    }
                }
            }
        }
    }
    Ok(out)
}
