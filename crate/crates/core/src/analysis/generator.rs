use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{orthonormalize, DenseMatrix, LowRankFactorization};

pub const MAX_REJECTION_ATTEMPTS: usize = 10_000;

/// A random rank-`k` matrix whose factors satisfy `max|U_ij| <= sqrt(mu/m)` and
/// `max|V_ij| <= sqrt(mu/n)`.
///
/// Factor entries are bounded (random sign times a magnitude in `[0.5, 1]`),
/// orthonormalized and rejected until the cap holds. Unbounded Gaussian
/// factors almost never pass a cap like `mu = 3` once `m` is in the hundreds.
/// All singular values are 1, so `X = U V^T`.
pub fn random_incoherent<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    k: usize,
    mu: f64,
    rng: &mut R,
) -> Result<LowRankFactorization> {
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidArgument(format!("rank {k} invalid for {m}x{n}")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("incoherence cap {mu} must be positive")));
    }
    let mut attempts = 0;
    let u = bounded_orthonormal(m, k, mu, rng, &mut attempts)?;
    let v = bounded_orthonormal(n, k, mu, rng, &mut attempts)?;
    LowRankFactorization::new(u, vec![1.0; k], v)
}

fn bounded_orthonormal<R: Rng + ?Sized>(
    rows: usize,
    k: usize,
    mu: f64,
    rng: &mut R,
    attempts: &mut usize,
) -> Result<DenseMatrix> {
    let cap = (mu / rows as f64).sqrt();
    while *attempts < MAX_REJECTION_ATTEMPTS {
        *attempts += 1;
        let raw = DenseMatrix::from_fn(rows, k, |_, _| {
            let magnitude = 0.5 + 0.5 * rng.random::<f64>();
            if rng.random::<bool>() {
                magnitude
            } else {
                -magnitude
            }
        });
        let q = orthonormalize(&raw);
        if q.max_abs() <= cap {
            return Ok(q);
        }
    }
    Err(Error::RejectionSampling {
        mu,
        attempts: *attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::incoherence;
    use crate::rng;

    #[test]
    fn respects_cap() {
        let mut g = rng::seeded(1);
        for &(m, n, k) in &[(256, 256, 2), (40, 90, 5), (8, 8, 1)] {
            let x = random_incoherent(m, n, k, 3.0, &mut g).unwrap();
            let r = incoherence(&x, m, n).unwrap();
            assert!(r.mu <= 3.0 + 1e-12, "{m}x{n} k={k}: {}", r.mu);
        }
    }

    #[test]
    fn impossible_cap_fails() {
        let mut g = rng::seeded(2);
        // an orthonormal column always has an entry of at least 1/sqrt(m)
        assert!(matches!(
            random_incoherent(30, 30, 2, 0.9, &mut g),
            Err(Error::RejectionSampling { .. })
        ));
    }
}
