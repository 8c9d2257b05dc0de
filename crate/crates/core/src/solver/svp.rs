//! The singular value projection iteration
//! `X^{t+1} = P_k(X^t - eta_t A^T(A(X^t) - b))`, started from `X^0 = 0`.

use std::time::Instant;

use crate::analysis::incoherence::incoherence_unchecked;
use crate::error::{Error, Result};
use crate::matrix::{truncated_svd_with, DenseMatrix, EntrySet, LowRankFactorization, StructuredOperand};
use crate::operators::{AffineMap, EntrySamplingMap};
use crate::solver::{IterationRecord, PlateauRule, SolveStatus, SolveTrace, SolverConfig, StepPolicy};

/// Runs SVP on `A(X) = b`.
///
/// When `map` is an entry-sampling operator the gradient step is never
/// materialized: the SVD runs on the low-rank iterate plus the sparse residual.
pub fn svp_solve<A: AffineMap + ?Sized>(
    map: &A,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(LowRankFactorization, SolveTrace)> {
    svp_solve_observed(map, b, cfg, |_, _| {})
}

/// [`svp_solve`] that calls `observer(t, &X^t)` after every iteration.
pub fn svp_solve_observed<A, F>(
    map: &A,
    b: &[f64],
    cfg: &SolverConfig,
    mut observer: F,
) -> Result<(LowRankFactorization, SolveTrace)>
where
    A: AffineMap + ?Sized,
    F: FnMut(usize, &LowRankFactorization),
{
    cfg.validate()?;
    let (m, n) = (map.rows(), map.cols());
    if b.len() != map.measurements() {
        return Err(Error::DimensionMismatch(format!(
            "{} measurements supplied, operator produces {}",
            b.len(),
            map.measurements()
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("measurement vector"));
    }
    let sampling = map.as_entry_sampling();
    if matches!(cfg.step, StepPolicy::CompletionDefault { .. }) && sampling.is_none() {
        return Err(Error::StepPolicyMisuse("completion-default"));
    }
    let density = sampling.map(EntrySamplingMap::density);
    let k = cfg.rank.min(m.min(n));

    let start = Instant::now();
    let mut x = match &cfg.initial {
        Some(x0) => {
            if (x0.rows(), x0.cols()) != (m, n) {
                return Err(Error::DimensionMismatch("initial iterate has the wrong shape".into()));
            }
            x0.clone()
        }
        None => LowRankFactorization::zeros(m, n, k),
    };
    let mut residual: Vec<f64> = if cfg.initial.is_some() {
        map.apply_lowrank(&x).iter().zip(b).map(|(a, y)| a - y).collect()
    } else {
        b.iter().map(|v| -v).collect()
    };
    let mut sq = squared(&residual);

    let record = |t: usize, x: &LowRankFactorization, sq: f64, step: f64| {
        let inc = (cfg.track_incoherence && x.rank(1e-12) > 0).then(|| incoherence_unchecked(x));
        IterationRecord {
            t,
            objective: 0.5 * sq,
            rank: x.rank(1e-12),
            mu: inc.map(|r| r.mu),
            mu_left: inc.map(|r| r.mu_left),
            step,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    };

    let threshold = cfg.stop_threshold();
    let mut records = vec![record(0, &x, sq, 0.0)];
    if sq <= threshold {
        return Ok((x, SolveTrace {
            records,
            status: SolveStatus::Converged,
        }));
    }

    let mut svd_opts = cfg.svd.clone();
    svd_opts.seed = cfg.seed;
    let mut basis: Option<DenseMatrix> = None;
    let mut status = SolveStatus::MaxIterations;

    for t in 1..=cfg.max_iterations {
        let eta = cfg.step.step(t, density)?;
        let svd = match sampling {
            Some(s) => {
                let grad = s.entries_with(&residual)?;
                let y = StructuredOperand::new(Some((1.0, x)), Some((-eta, grad)))?;
                truncated_svd_with(&y, k, &svd_opts, basis.as_ref())?
            }
            None => {
                let mut y = x.to_dense();
                y.add_scaled(-eta, &map.adjoint(&residual));
                truncated_svd_with(&y, k, &svd_opts, basis.as_ref())?
            }
        };
        log::trace!("svp t={t} inner={} residual={:.2e}", svd.iterations, svd.residual);
        x = svd.factors;
        basis = Some(svd.basis);

        residual = map.apply_lowrank(&x).iter().zip(b).map(|(a, y)| a - y).collect();
        sq = squared(&residual);
        if !sq.is_finite() {
            return Err(Error::NonFinite("SVP iterate"));
        }
        records.push(record(t, &x, sq, eta));
        observer(t, &x);

        if sq <= threshold {
            status = SolveStatus::Converged;
            break;
        }
        if let Some(PlateauRule { window, rel }) = cfg.plateau {
            if records.len() > window {
                let prev = records[records.len() - 1 - window].objective;
                let now = 0.5 * sq;
                if prev - now <= rel * prev {
                    status = SolveStatus::Stalled;
                    break;
                }
            }
        }
    }
    log::debug!(
        "svp: {} iterations, status {:?}, objective {:.3e}",
        records.len() - 1,
        status,
        0.5 * sq
    );
    Ok((x, SolveTrace { records, status }))
}

/// SVP for noisy measurements `b = A(X*) + e`: identical iteration, plus a
/// plateau stop (default: less than `1e-6` relative decrease over 5
/// iterations) since the residual cannot fall below the noise floor.
pub fn svp_solve_noisy<A: AffineMap + ?Sized>(
    map: &A,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(LowRankFactorization, SolveTrace)> {
    let cfg = noisy_config(cfg);
    svp_solve(map, b, &cfg)
}

pub(crate) fn noisy_config(cfg: &SolverConfig) -> SolverConfig {
    let mut cfg = cfg.clone();
    if cfg.plateau.is_none() {
        cfg.plateau = Some(PlateauRule::default());
    }
    cfg
}

/// Matrix completion from `b = P_Omega(X*)` listed in canonical order.
pub fn svp_complete(
    map: &EntrySamplingMap,
    b: &[f64],
    cfg: &SolverConfig,
) -> Result<(LowRankFactorization, SolveTrace)> {
    svp_solve(map, b, cfg)
}

/// Matrix completion from an observed entry set; density is `|Omega| / mn`.
pub fn svp_complete_entries(
    observed: &EntrySet,
    cfg: &SolverConfig,
) -> Result<(LowRankFactorization, SolveTrace)> {
    if observed.is_empty() {
        return Err(Error::NoMeasurements);
    }
    let map = EntrySamplingMap::from_entries(observed);
    svp_solve(&map, observed.values(), cfg)
}

fn squared(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{gaussian_ensemble, sample_entries, SamplingModel};
    use crate::rng;

    fn low_rank(m: usize, n: usize, k: usize, seed: u64) -> LowRankFactorization {
        let mut g = rng::seeded(seed);
        LowRankFactorization::from_factors(
            &DenseMatrix::random_gaussian(m, k, &mut g),
            &DenseMatrix::random_gaussian(n, k, &mut g),
        )
        .unwrap()
    }

    #[test]
    fn zero_measurements_return_zero() {
        let map = gaussian_ensemble(6, 5, 40, 0).unwrap();
        let cfg = SolverConfig::new(2, StepPolicy::ARMP);
        let (x, trace) = svp_solve(&map, &vec![0.0; 40], &cfg).unwrap();
        assert_eq!(x.frobenius_norm(), 0.0);
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.status, SolveStatus::Converged);
    }

    #[test]
    fn full_observation_recovers_in_one_step() {
        let xs = low_rank(12, 10, 2, 1);
        let map = sample_entries(12, 10, SamplingModel::FixedCount { count: 120 }, 0).unwrap();
        let b = map.apply_lowrank(&xs);
        let cfg = SolverConfig::new(2, StepPolicy::CompletionDefault { delta: 0.0 }).with_tolerance(1e-20);
        let (x, trace) = svp_complete(&map, &b, &cfg).unwrap();
        assert_eq!(trace.iterations(), 1);
        assert!(x.distance(&xs) < 1e-10 * xs.frobenius_norm());
    }

    #[test]
    fn completion_policy_requires_sampling() {
        let map = gaussian_ensemble(4, 4, 20, 0).unwrap();
        let cfg = SolverConfig::new(1, StepPolicy::COMPLETION);
        assert!(matches!(
            svp_solve(&map, &[1.0; 20], &cfg),
            Err(Error::StepPolicyMisuse(_))
        ));
    }

    #[test]
    fn measurement_length_checked() {
        let map = gaussian_ensemble(4, 4, 20, 0).unwrap();
        let cfg = SolverConfig::new(1, StepPolicy::ARMP);
        assert!(matches!(svp_solve(&map, &[1.0; 3], &cfg), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn gaussian_recovery_small() {
        let xs = low_rank(20, 20, 2, 3);
        let map = gaussian_ensemble(20, 20, 6 * 2 * 20, 4).unwrap();
        let b = map.apply_lowrank(&xs);
        let bsq: f64 = b.iter().map(|v| v * v).sum();
        let cfg = SolverConfig::new(2, StepPolicy::ARMP).with_tolerance(1e-6 * bsq).with_max_iterations(200);
        let (x, trace) = svp_solve(&map, &b, &cfg).unwrap();
        assert_eq!(trace.status, SolveStatus::Converged);
        assert!(x.k() == 2);
        assert!(x.distance(&xs) < 1e-2 * xs.frobenius_norm());
        // objective never increases in the noiseless RIP regime
        assert!(trace.objectives().windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn trace_is_deterministic() {
        let xs = low_rank(30, 30, 2, 5);
        let map = sample_entries(30, 30, SamplingModel::Bernoulli { p: 0.5 }, 6).unwrap();
        let b = map.apply_lowrank(&xs);
        let cfg = SolverConfig::new(2, StepPolicy::COMPLETION).with_incoherence().with_max_iterations(30);
        let (_, t1) = svp_complete(&map, &b, &cfg).unwrap();
        let (_, t2) = svp_complete(&map, &b, &cfg).unwrap();
        assert!(t1.same_numerics(&t2));
        assert!(t1.records.len() <= cfg.max_iterations + 1);
        assert!(t1.records[1..].iter().all(|r| r.mu.is_some() && r.rank <= 2));
    }

    #[test]
    fn noisy_with_zero_noise_matches_plain() {
        let xs = low_rank(15, 15, 2, 7);
        let map = gaussian_ensemble(15, 15, 180, 8).unwrap();
        let b = map.apply_lowrank(&xs);
        let bsq: f64 = b.iter().map(|v| v * v).sum();
        let cfg = SolverConfig::new(2, StepPolicy::ARMP).with_tolerance(1e-8 * bsq);
        let (_, plain) = svp_solve(&map, &b, &cfg).unwrap();
        let (_, noisy) = svp_solve_noisy(&map, &b, &cfg.clone().with_noise_floor(0.0)).unwrap();
        assert!(plain.same_numerics(&noisy));
    }
}
