//! Heuristics for choosing the target rank `k`.

use crate::error::{Error, Result};
use crate::matrix::{truncated_svd_with, EntrySet, SvdOptions};
use crate::operators::AffineMap;
use crate::solver::svp::{noisy_config, svp_solve};
use crate::solver::SolverConfig;

/// Relative change in final objective below which increasing `k` no longer helps.
pub const RANK_PLATEAU_REL: f64 = 0.01;
/// Minimum `sigma_k / sigma_{k+1}` accepted as a spectral gap.
pub const SPECTRAL_GAP_RATIO: f64 = 3.0;
pub const DEFAULT_K_MAX: usize = 50;

/// Runs SVP at `k0, k0 + k_step, ...` (up to `k_max`) and returns the first
/// `k` whose final objective is within 1% of the next increment's, or that
/// already meets the residual tolerance.
pub fn select_rank_armp<A: AffineMap + ?Sized>(
    map: &A,
    b: &[f64],
    k0: usize,
    k_step: usize,
    k_max: usize,
    cfg: &SolverConfig,
) -> Result<usize> {
    if k0 == 0 || k_step == 0 {
        return Err(Error::InvalidArgument("k0 and k_step must be at least 1".into()));
    }
    let k_max = k_max.min(map.rows().min(map.cols()));
    let run = |k: usize| -> Result<(f64, bool)> {
        let mut c = noisy_config(cfg);
        c.rank = k;
        let (_, trace) = svp_solve(map, b, &c)?;
        Ok((trace.final_objective(), trace.status == crate::solver::SolveStatus::Converged))
    };

    let mut k = k0;
    let (mut current, mut converged) = run(k)?;
    loop {
        if converged {
            return Ok(k);
        }
        let next_k = k + k_step;
        if next_k > k_max {
            return Err(Error::BudgetExhausted(k_max));
        }
        let (next, next_converged) = run(next_k)?;
        log::debug!("rank search: k = {k} -> {current:.4e}, k = {next_k} -> {next:.4e}");
        if current - next <= RANK_PLATEAU_REL * current {
            return Ok(k);
        }
        k = next_k;
        current = next;
        converged = next_converged;
    }
}

/// Picks `k` at the largest ratio `sigma_k / sigma_{k+1}` of the zero-filled
/// observed matrix, for `k <= k_max`; the ratio must reach 3.
pub fn select_rank_completion(observed: &EntrySet, k_max: usize) -> Result<usize> {
    if observed.is_empty() {
        return Err(Error::NoMeasurements);
    }
    let min_dim = observed.rows().min(observed.cols());
    let want = (k_max + 1).min(min_dim);
    if want < 2 {
        return Err(Error::InvalidArgument("need at least two singular values".into()));
    }
    let opts = SvdOptions {
        tol: 1e-8,
        max_inner: 1000,
        ..SvdOptions::default()
    };
    let svd = truncated_svd_with(observed, want, &opts, None)?;
    // values at round-off level of the top one count as zero
    let floor = svd.factors.sigma()[0] * 1e-10;
    let sigma: Vec<f64> = svd.factors.sigma().iter().map(|&s| if s > floor { s } else { 0.0 }).collect();
    let mut best = (0usize, 0.0f64);
    for k in 1..want {
        let ratio = if sigma[k] > 0.0 {
            sigma[k - 1] / sigma[k]
        } else if sigma[k - 1] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if ratio > best.1 {
            best = (k, ratio);
        }
    }
    if best.1 >= SPECTRAL_GAP_RATIO {
        Ok(best.0)
    } else {
        Err(Error::NoSpectralGap {
            best_k: best.0,
            best_ratio: best.1,
        })
    }
}
