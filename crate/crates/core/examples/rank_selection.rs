//! Choosing the rank when it is unknown: an incremental search on Gaussian
//! measurements and a spectral-gap rule on sampled entries.

use svp::harness::fixtures::{completion_instance, lowrank_truth};
use svp::operators::{gaussian_ensemble, AffineMap};
use svp::rng;
use svp::solver::{select_rank_armp, select_rank_completion, SolverConfig, StepPolicy, DEFAULT_K_MAX};

fn main() -> svp::Result<()> {
    let n = 30;
    let truth = lowrank_truth(n, n, 3, &mut rng::seeded(5));
    let map = gaussian_ensemble(n, n, 6 * 4 * n, 6)?;
    let b = map.apply_lowrank(&truth);
    let b_sq: f64 = b.iter().map(|v| v * v).sum();
    let cfg = SolverConfig::new(1, StepPolicy::ARMP).with_tolerance(1e-10 * b_sq);
    println!("incremental search: k = {}", select_rank_armp(&map, &b, 1, 1, DEFAULT_K_MAX, &cfg)?);

    let inst = completion_instance(300, 2, 0.3, 3.0, None, 7, 8)?;
    let observed = inst.map.entries_with(&inst.observed)?;
    println!("spectral gap: k = {}", select_rank_completion(&observed, DEFAULT_K_MAX)?);
    Ok(())
}
