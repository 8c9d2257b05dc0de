use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::LowRankFactorization;

const ORTHONORMAL_TOL: f64 = 1e-6;

/// Incoherence of a factorization `U Sigma V^T` of an `m x n` matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncoherenceReport {
    /// Smallest `mu` with `max|U_ij| <= sqrt(mu/m)` and `max|V_ij| <= sqrt(mu/n)`.
    pub mu: f64,
    /// `sqrt(m) max |U_ij|`.
    pub mu_left: f64,
    /// `sqrt(n) max |V_ij|`.
    pub mu_right: f64,
}

/// Incoherence of `x`, counting only singular directions with nonzero singular value.
pub fn incoherence(x: &LowRankFactorization, m: usize, n: usize) -> Result<IncoherenceReport> {
    if x.rows() != m || x.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "factorization is {}x{}, expected {m}x{n}",
            x.rows(),
            x.cols()
        )));
    }
    let dev = x.orthonormality_error();
    if !(dev <= ORTHONORMAL_TOL) {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(incoherence_unchecked(x))
}

pub(crate) fn incoherence_unchecked(x: &LowRankFactorization) -> IncoherenceReport {
    let (m, n) = (x.rows(), x.cols());
    let active = x.rank(1e-12);
    let max_abs = |f: &crate::matrix::DenseMatrix| {
        let mut best: f64 = 0.0;
        for i in 0..f.rows() {
            for &v in &f.row(i)[..active] {
                best = best.max(v.abs());
            }
        }
        best
    };
    let mu_left = (m as f64).sqrt() * max_abs(x.u());
    let mu_right = (n as f64).sqrt() * max_abs(x.v());
    IncoherenceReport {
        mu: (mu_left * mu_left).max(mu_right * mu_right),
        mu_left,
        mu_right,
    }
}
