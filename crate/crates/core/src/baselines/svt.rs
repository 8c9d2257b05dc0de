use std::time::Instant;

use crate::error::{Error, Result};
use crate::matrix::{truncated_svd_with, DenseMatrix, LinearOperator, LowRankFactorization, SvdOptions};
use crate::operators::AffineMap;
use crate::solver::{IterationRecord, SolveStatus, SolveTrace};

/// Objective growth (relative to the starting objective) treated as divergence.
const DIVERGENCE_FACTOR: f64 = 10.0;
/// Rank increment when the computed spectrum has not yet dropped below `tau`.
const RANK_INCREMENT: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct SvtConfig {
    /// Soft threshold `tau` applied to singular values.
    pub tau: f64,
    /// Dual step size.
    pub step: f64,
    /// Stop when `||A(X) - b|| <= tolerance * ||b||`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl SvtConfig {
    /// Defaults for completing an `m x n` matrix from density `p`:
    /// `tau = 5 sqrt(mn)`, step `1.2 / p`.
    pub fn for_completion(m: usize, n: usize, p: f64) -> Self {
        SvtConfig {
            tau: 5.0 * ((m * n) as f64).sqrt(),
            step: 1.2 / p,
            tolerance: 1e-4,
            max_iterations: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.tau) || !positive(self.step) || !positive(self.tolerance) || self.max_iterations == 0 {
            return Err(Error::Config(format!("SVT parameters must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Soft-thresholds the singular values of `y` at `tau`:
/// `U diag(max(sigma - tau, 0)) V^T`.
pub fn shrink<O: LinearOperator + ?Sized>(y: &O, tau: f64) -> Result<LowRankFactorization> {
    shrink_from(y, tau, 1, &svt_svd_options(), None).map(|(x, _)| x)
}

fn svt_svd_options() -> SvdOptions {
    SvdOptions {
        tol: 1e-9,
        max_inner: 1000,
        best_effort: true,
        ..SvdOptions::default()
    }
}

/// Computes triplets in growing batches until one falls to `tau` or below.
fn shrink_from<O: LinearOperator + ?Sized>(
    y: &O,
    tau: f64,
    start_rank: usize,
    opts: &SvdOptions,
    warm: Option<&DenseMatrix>,
) -> Result<(LowRankFactorization, Option<DenseMatrix>)> {
    let (m, n) = (y.nrows(), y.ncols());
    let min_dim = m.min(n);
    let mut r = start_rank.clamp(1, min_dim);
    let mut warm = warm.cloned();
    let svd = loop {
        let svd = truncated_svd_with(y, r, opts, warm.as_ref())?;
        if r == min_dim || svd.factors.sigma()[r - 1] <= tau {
            break svd;
        }
        warm = Some(svd.basis);
        r = (r + RANK_INCREMENT).min(min_dim);
    };
    let keep = svd.factors.sigma().iter().filter(|&&s| s > tau).count();
    if keep == 0 {
        return Ok((LowRankFactorization::zeros(m, n, 1), Some(svd.basis)));
    }
    let kept = svd.factors.truncated(keep);
    let sigma = kept.sigma().iter().map(|s| s - tau).collect();
    let x = LowRankFactorization::new(kept.u().clone(), sigma, kept.v().clone())?;
    Ok((x, Some(svd.basis)))
}

/// Singular value thresholding:
/// `X^t = shrink(Y^t, tau)`, `Y^{t+1} = Y^t + step A^T(b - A(X^t))`, from `Y^0 = 0`.
///
/// For entry-sampling maps `Y` stays supported on the sampled set and is kept sparse.
pub fn svt_solve<A: AffineMap + ?Sized>(map: &A, b: &[f64], cfg: &SvtConfig) -> Result<(DenseMatrix, SolveTrace)> {
    let (x, trace) = svt_solve_lowrank(map, b, cfg)?;
    Ok((x.to_dense(), trace))
}

/// [`svt_solve`] returning the iterate in factored form.
pub fn svt_solve_lowrank<A: AffineMap + ?Sized>(
    map: &A,
    b: &[f64],
    cfg: &SvtConfig,
) -> Result<(LowRankFactorization, SolveTrace)> {
    svt_solve_observed(map, b, cfg, |_, _| {})
}

/// [`svt_solve_lowrank`] that calls `observer(t, &X^t)` after every iteration.
pub fn svt_solve_observed<A, F>(
    map: &A,
    b: &[f64],
    cfg: &SvtConfig,
    mut observer: F,
) -> Result<(LowRankFactorization, SolveTrace)>
where
    A: AffineMap + ?Sized,
    F: FnMut(usize, &LowRankFactorization),
{
    cfg.validate()?;
    if b.len() != map.measurements() {
        return Err(Error::DimensionMismatch(format!(
            "{} measurements supplied, operator produces {}",
            b.len(),
            map.measurements()
        )));
    }
    let (m, n) = (map.rows(), map.cols());
    let start = Instant::now();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let initial = 0.5 * b_norm * b_norm;
    let elapsed = || start.elapsed().as_secs_f64() * 1e3;

    let mut x = LowRankFactorization::zeros(m, n, 1);
    let mut records = vec![IterationRecord {
        t: 0,
        objective: initial,
        rank: 0,
        mu: None,
        mu_left: None,
        step: 0.0,
        wall_ms: elapsed(),
    }];
    if b_norm == 0.0 {
        return Ok((x, SolveTrace {
            records,
            status: SolveStatus::Converged,
        }));
    }

    let sampling = map.as_entry_sampling();
    // Y is kept as either its sampled values or a dense matrix.
    let mut y_values = vec![0.0; b.len()];
    let mut y_dense = if sampling.is_none() {
        Some(DenseMatrix::zeros(m, n))
    } else {
        None
    };
    let mut residual: Vec<f64> = b.to_vec(); // b - A(X^0)
    let opts = svt_svd_options();
    let mut basis: Option<DenseMatrix> = None;
    let mut rank = 0usize;
    let mut status = SolveStatus::MaxIterations;

    for t in 1..=cfg.max_iterations {
        match (&mut y_dense, sampling) {
            (Some(y), _) => y.add_scaled(cfg.step, &map.adjoint(&residual)),
            (None, _) => y_values.iter_mut().zip(&residual).for_each(|(y, r)| *y += cfg.step * r),
        }
        let (next, next_basis) = match (&y_dense, sampling) {
            (Some(y), _) => shrink_from(y, cfg.tau, rank + 1, &opts, basis.as_ref())?,
            (None, Some(s)) => {
                let y = s.entries_with(&y_values)?;
                shrink_from(&y, cfg.tau, rank + 1, &opts, basis.as_ref())?
            }
            (None, None) => unreachable!("dense Y exists whenever the map is not entry sampling"),
        };
        x = next;
        basis = next_basis;
        rank = x.rank(0.0);

        residual = map.apply_lowrank(&x).iter().zip(b).map(|(a, v)| v - a).collect();
        let sq: f64 = residual.iter().map(|v| v * v).sum();
        let objective = 0.5 * sq;
        if !objective.is_finite() || objective > DIVERGENCE_FACTOR * initial {
            return Err(Error::Divergence {
                iteration: t,
                objective,
                initial,
            });
        }
        log::trace!("svt t={t} rank={rank} objective={objective:.4e}");
        records.push(IterationRecord {
            t,
            objective,
            rank,
            mu: None,
            mu_left: None,
            step: cfg.step,
            wall_ms: elapsed(),
        });
        observer(t, &x);
        if sq.sqrt() <= cfg.tolerance * b_norm {
            status = SolveStatus::Converged;
            break;
        }
    }
    log::debug!("svt: {} iterations, status {status:?}, rank {rank}", records.len() - 1);
    Ok((x, SolveTrace { records, status }))
}
