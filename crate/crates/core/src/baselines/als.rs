use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, EntrySet, LowRankFactorization};
use crate::rng;
use crate::solver::{IterationRecord, SolveStatus, SolveTrace};

#[derive(Clone, Debug, PartialEq)]
pub struct AlsConfig {
    pub rank: usize,
    /// Ridge weight on `||L||_F^2 + ||R||_F^2`.
    pub lambda: f64,
    pub max_sweeps: usize,
    /// Stop once a sweep lowers the objective by less than this fraction.
    pub tolerance: f64,
    pub seed: u64,
}

impl AlsConfig {
    pub fn new(rank: usize) -> Self {
        AlsConfig {
            rank,
            lambda: 0.1,
            max_sweeps: 100,
            tolerance: 1e-9,
            seed: 0,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.max_sweeps = sweeps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Config("ALS rank must be at least 1".into()));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Config(format!("ridge weight {} must be nonnegative", self.lambda)));
        }
        if self.max_sweeps == 0 {
            return Err(Error::Config("ALS needs at least one sweep".into()));
        }
        Ok(())
    }
}

/// Observations grouped by row (or by column), as `(other index, value)`.
fn group(observed: &EntrySet, by_row: bool) -> Vec<Vec<(usize, f64)>> {
    let len = if by_row { observed.rows() } else { observed.cols() };
    let mut out = vec![Vec::new(); len];
    for (i, j, v) in observed.iter() {
        if by_row {
            out[i].push((j, v));
        } else {
            out[j].push((i, v));
        }
    }
    out
}

/// Ridge solve for every row of `target` given the fixed factor.
fn solve_side(groups: &[Vec<(usize, f64)>], fixed: &DenseMatrix, lambda: f64, side: &str) -> Result<DenseMatrix> {
    let k = fixed.cols();
    let rows: Vec<Vec<f64>> = groups
        .par_iter()
        .enumerate()
        .map(|(idx, obs)| -> Result<Vec<f64>> {
            if obs.is_empty() {
                if lambda == 0.0 {
                    return Err(Error::SingularSystem(format!("{side} {idx} has no observations and lambda = 0")));
                }
                return Ok(vec![0.0; k]);
            }
            let mut gram = DMatrix::<f64>::identity(k, k) * lambda;
            let mut rhs = DVector::<f64>::zeros(k);
            for &(other, value) in obs {
                let f = fixed.row(other);
                for a in 0..k {
                    rhs[a] += value * f[a];
                    for c in 0..k {
                        gram[(a, c)] += f[a] * f[c];
                    }
                }
            }
            let chol = gram
                .cholesky()
                .ok_or_else(|| Error::SingularSystem(format!("normal equations for {side} {idx} are singular")))?;
            Ok(chol.solve(&rhs).iter().copied().collect())
        })
        .collect::<Result<_>>()?;
    Ok(DenseMatrix::from_fn(groups.len(), k, |i, a| rows[i][a]))
}

fn objective(observed: &EntrySet, left: &DenseMatrix, right: &DenseMatrix, lambda: f64) -> f64 {
    let fit: f64 = observed
        .iter()
        .map(|(i, j, v)| {
            let pred: f64 = left.row(i).iter().zip(right.row(j)).map(|(a, b)| a * b).sum();
            (pred - v).powi(2)
        })
        .sum();
    fit + lambda * (left.squared_norm() + right.squared_norm())
}

/// Regularized alternating least squares on the observed entries:
/// minimizes `sum_Omega (L_i . R_j - y_ij)^2 + lambda (||L||^2 + ||R||^2)`.
///
/// The trace records the objective after every half-sweep (`t` counts
/// half-sweeps), so monotonicity can be checked step by step.
pub fn als_solve(observed: &EntrySet, cfg: &AlsConfig) -> Result<(LowRankFactorization, SolveTrace)> {
    cfg.validate()?;
    if observed.is_empty() {
        return Err(Error::NoMeasurements);
    }
    let (m, n) = (observed.rows(), observed.cols());
    let k = cfg.rank;
    if k > m.min(n) {
        return Err(Error::InvalidArgument(format!("rank {k} exceeds min({m}, {n})")));
    }
    let start = Instant::now();
    let by_row = group(observed, true);
    let by_col = group(observed, false);

    let rms = (observed.squared_norm() / observed.len() as f64).sqrt();
    let scale = (rms.max(f64::MIN_POSITIVE) / k as f64).sqrt();
    let mut g = rng::seeded(cfg.seed);
    let mut right = DenseMatrix::random_gaussian(n, k, &mut g);
    right.scale(scale);
    let mut left = DenseMatrix::zeros(m, k);

    let record = |t: usize, objective: f64| IterationRecord {
        t,
        objective,
        rank: k,
        mu: None,
        mu_left: None,
        step: 0.0,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let mut records = vec![record(0, objective(observed, &left, &right, cfg.lambda))];
    let mut status = SolveStatus::MaxIterations;
    let mut previous = records[0].objective;
    for sweep in 1..=cfg.max_sweeps {
        left = solve_side(&by_row, &right, cfg.lambda, "row")?;
        records.push(record(2 * sweep - 1, objective(observed, &left, &right, cfg.lambda)));
        right = solve_side(&by_col, &left, cfg.lambda, "column")?;
        let current = objective(observed, &left, &right, cfg.lambda);
        records.push(record(2 * sweep, current));
        if sweep > 1 && previous - current <= cfg.tolerance * previous {
            status = SolveStatus::Converged;
            break;
        }
        previous = current;
    }
    log::debug!("als: {} half-sweeps, objective {previous:.4e}", records.len() - 1);
    let x = LowRankFactorization::from_factors(&left, &right)?;
    Ok((x, SolveTrace { records, status }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank_two(m: usize, n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(m, n, |i, j| (i as f64 * 0.3).sin() * (j as f64 * 0.2 + 1.0) + (i + 2 * j) as f64 * 0.05)
    }

    #[test]
    fn exact_on_full_observation() {
        let x = rank_two(15, 12);
        let observed = EntrySet::from_dense(&x);
        let cfg = AlsConfig::new(2).with_lambda(0.0).with_sweeps(25);
        let (fit, trace) = als_solve(&observed, &cfg).unwrap();
        let rmse = fit.to_dense().sub(&x).frobenius_norm() / (180f64).sqrt();
        assert!(rmse <= 1e-6, "{rmse}");
        assert!(trace.iterations() <= 50);
    }

    #[test]
    fn heavy_ridge_shrinks_to_zero() {
        let observed = EntrySet::from_dense(&rank_two(10, 10));
        let (fit, _) = als_solve(&observed, &AlsConfig::new(2).with_lambda(1e6)).unwrap();
        assert!(fit.to_dense().max_abs() < 1e-3);
    }

    #[test]
    fn empty_row_without_ridge_is_singular() {
        let observed = EntrySet::new(3, 3, vec![(0, 0, 1.0), (0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let cfg = AlsConfig::new(1).with_lambda(0.0);
        assert!(matches!(als_solve(&observed, &cfg), Err(Error::SingularSystem(_))));
        assert!(als_solve(&observed, &AlsConfig::new(1)).is_ok());
    }
}
