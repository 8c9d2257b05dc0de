use std::time::Instant;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{cell_seed, elapsed_ms, ExperimentOutcome};
use crate::baselines::{als_solve, AlsConfig};
use crate::error::Result;
use crate::harness::fixtures::{lowrank_truth, rmse_on};
use crate::harness::ratings::{ingest_ratings, RatingsDataset};
use crate::harness::{params, ExperimentConfig, Metric, ResultRow};
use crate::solver::{svp_complete_entries, SolverConfig, StepPolicy};

/// SVP test RMSE may exceed ALS test RMSE by at most this factor.
pub const ALS_TOLERANCE: f64 = 1.25;
/// Step `5 / sqrt(t)`.
pub const RATINGS_STEP: StepPolicy = StepPolicy::Decaying { c: 5.0 };
/// Deviation of the rating noise in the synthetic surrogate.
const SURROGATE_NOISE: f64 = 0.1;
const SURROGATE_MEAN: f64 = 3.5;

/// Synthetic ratings: a constant offset plus a rank-`(rank - 1)` part with
/// unit RMS entries plus Gaussian noise, sampled at `density` and split
/// `split` / `1 - split` into train and test.
pub fn surrogate_ratings(
    users: usize,
    items: usize,
    rank: usize,
    density: f64,
    split: f64,
    seed: u64,
) -> Result<RatingsDataset> {
    let mut g = crate::rng::seeded(seed);
    let part = lowrank_truth(users, items, rank.saturating_sub(1).max(1), &mut g);
    let noise = Normal::new(0.0, SURROGATE_NOISE).expect("valid deviation");
    let mut ratings = Vec::new();
    for i in 0..users {
        for j in 0..items {
            if g.random::<f64>() < density {
                ratings.push((i, j, SURROGATE_MEAN + part.entry(i, j) + noise.sample(&mut g)));
            }
        }
    }
    RatingsDataset::from_triples(users, items, ratings, split, seed ^ 0x5eed)
}

/// Train-on-split, test-on-holdout comparison of SVP (step `5 / sqrt(t)`,
/// rank `k`, a fixed number of iterations) and ALS on either a ratings file
/// or the synthetic surrogate. The decaying step makes the objective rise
/// for the first few iterations, so no plateau stop is used.
pub fn run_ratings(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let k = cfg.ranks[0];
    let mut out = ExperimentOutcome::default();
    for trial in 0..cfg.trials {
        let seed = cell_seed(cfg.seed, &[trial as u64]);
        let (dataset, source) = match &cfg.ratings {
            Some(input) => (ingest_ratings(&input.path, None, input.split, seed)?, "file"),
            None => {
                let (users, items) = (cfg.sizes[0], *cfg.sizes.get(1).unwrap_or(&cfg.sizes[0]));
                let density = cfg.densities.first().copied().unwrap_or(0.25);
                (surrogate_ratings(users, items, k, density, 0.8, seed)?, "surrogate")
            }
        };
        let (train, test) = (dataset.train()?, dataset.test()?);
        let cell = params(&[
            ("source", source.to_string()),
            ("users", dataset.rows().to_string()),
            ("items", dataset.cols().to_string()),
            ("k", k.to_string()),
        ]);
        let row = |method: &str, metric, value| ResultRow::new(name, format!("{cell};method={method}"), metric, value, trial, seed);

        let start = Instant::now();
        let solver = SolverConfig::new(k, RATINGS_STEP)
            .with_tolerance(1e-12 * train.squared_norm())
            .with_max_iterations(cfg.max_iterations)
            .with_seed(seed);
        let (x, trace) = svp_complete_entries(&train, &solver)?;
        let ms = elapsed_ms(start);
        let svp = rmse_on(&x, &test);
        out.rows.push(row("svp", Metric::Rmse, svp));
        out.rows.push(row("svp", Metric::Iterations, trace.iterations() as f64));
        out.rows.push(row("svp", Metric::WallMs, ms));

        let start = Instant::now();
        let (x, trace) = als_solve(&train, &AlsConfig::new(k).with_seed(seed))?;
        let ms = elapsed_ms(start);
        let als = rmse_on(&x, &test);
        out.rows.push(row("als", Metric::Rmse, als));
        out.rows.push(row("als", Metric::Iterations, trace.iterations() as f64));
        out.rows.push(row("als", Metric::WallMs, ms));

        if svp > ALS_TOLERANCE * als {
            out.failures.push(format!(
                "{name} trial {trial}: SVP test RMSE {svp:.4} above {ALS_TOLERANCE} x ALS {als:.4}"
            ));
        }
    }
    Ok(out)
}
