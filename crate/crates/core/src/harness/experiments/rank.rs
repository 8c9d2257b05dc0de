use rand::Rng;

use super::{cell_seed, ExperimentOutcome};
use crate::error::Result;
use crate::harness::fixtures::{completion_instance, lowrank_truth};
use crate::harness::{params, ExperimentConfig, Metric, ResultRow};
use crate::operators::{gaussian_ensemble, AffineMap, GaussianEnsemble};
use crate::solver::{select_rank_armp, select_rank_completion, SolverConfig, StepPolicy, DEFAULT_K_MAX};

use super::armp::MEMORY_BUDGET;

/// Smallest expected number of observations per row for the spectral-gap rule.
const MIN_ROW_SAMPLES: f64 = 20.0;

/// Both rank heuristics on instances of known rank: the incremental ARMP
/// rule on Gaussian measurements (`d = 6 (k + 1) n`, sizes that fit the
/// memory budget) and the spectral-gap rule on sampled entries (sizes with
/// at least 20 expected observations per row).
pub fn run_rank_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let mut out = ExperimentOutcome::default();
    for &n in &cfg.sizes {
        for &k in &cfg.ranks {
            let d = cfg.measurements.unwrap_or(6 * (k + 1) * n);
            if GaussianEnsemble::storage(n, n, d) <= MEMORY_BUDGET {
                let cell = params(&[("n", n.to_string()), ("k", k.to_string()), ("d", d.to_string()), ("rule", "armp".into())]);
                for trial in 0..cfg.trials {
                    let seed = cell_seed(cfg.seed, &[n as u64, k as u64, 0, trial as u64]);
                    let mut g = crate::rng::seeded(seed);
                    let truth = lowrank_truth(n, n, k, &mut g);
                    let map = gaussian_ensemble(n, n, d, g.random())?;
                    let b = map.apply_lowrank(&truth);
                    let b_sq: f64 = b.iter().map(|v| v * v).sum();
                    let solver = SolverConfig::new(1, StepPolicy::ARMP)
                        .with_tolerance(1e-10 * b_sq)
                        .with_max_iterations(cfg.max_iterations)
                        .with_seed(seed);
                    let chosen = select_rank_armp(&map, &b, 1, 1, DEFAULT_K_MAX, &solver)?;
                    out.rows.push(ResultRow::new(name, cell.clone(), Metric::ChosenRank, chosen as f64, trial, seed));
                    if chosen != k {
                        out.failures.push(format!("{name} [{cell}] trial {trial}: chose rank {chosen}"));
                    }
                }
            }
            for &p in &cfg.densities {
                if (n as f64) * p < MIN_ROW_SAMPLES {
                    continue;
                }
                let cell = params(&[("n", n.to_string()), ("k", k.to_string()), ("p", p.to_string()), ("rule", "gap".into())]);
                for trial in 0..cfg.trials {
                    let seed = cell_seed(cfg.seed, &[n as u64, k as u64, p.to_bits(), trial as u64]);
                    let inst = completion_instance(n, k, p, cfg.mu, None, seed, seed ^ 1)?;
                    let observed = inst.map.entries_with(&inst.observed)?;
                    match select_rank_completion(&observed, DEFAULT_K_MAX) {
                        Ok(chosen) => {
                            out.rows.push(ResultRow::new(name, cell.clone(), Metric::ChosenRank, chosen as f64, trial, seed));
                            if chosen != k {
                                out.failures.push(format!("{name} [{cell}] trial {trial}: chose rank {chosen}"));
                            }
                        }
                        Err(e) => out.failures.push(format!("{name} [{cell}] trial {trial}: {e}")),
                    }
                }
            }
        }
    }
    Ok(out)
}
