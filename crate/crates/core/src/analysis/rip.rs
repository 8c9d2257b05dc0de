use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::generator::random_incoherent;
use crate::analysis::regularity::{concentration_bound, regularity};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng;

/// Deviation levels probed by [`check_concentration`].
pub const CONCENTRATION_LEVELS: [f64; 3] = [0.1, 0.2, 0.3];
/// Allowed ratio of empirical tail frequency to the analytic bound.
pub const MONTE_CARLO_SLACK: f64 = 3.0;

/// Outcome of a Monte Carlo check of
/// `(1 - delta) p ||X||^2 <= ||P_Omega(X)||^2 <= (1 + delta) p ||X||^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RipCheckReport {
    pub trials: usize,
    pub violations: usize,
    /// Sampled-energy ratio `||P_Omega(X)||^2 / (p ||X||^2)` farthest from 1.
    pub worst_ratio: f64,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub mu: f64,
    pub p: f64,
    pub delta: f64,
}

/// Tail frequencies at one deviation level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationLevel {
    pub delta: f64,
    /// Trials with `||P_Omega(X)||^2 <= (1 - delta) p ||X||^2`.
    pub lower: usize,
    /// Trials with `||P_Omega(X)||^2 >= (1 + delta) p ||X||^2`.
    pub upper: usize,
    pub bound: f64,
}

impl ConcentrationLevel {
    pub fn frequency(&self, trials: usize) -> f64 {
        (self.lower + self.upper) as f64 / trials as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub trials: usize,
    pub p: f64,
    pub alpha: f64,
    pub levels: Vec<ConcentrationLevel>,
    /// Sample mean of `||P_Omega(X)||^2` and its standard error.
    pub mean: f64,
    pub std_error: f64,
    /// `p ||X||_F^2`.
    pub expected: f64,
    pub worst_ratio: f64,
}

impl ConcentrationReport {
    /// Whether every level's frequency stays within `slack` times its bound.
    pub fn within(&self, slack: f64) -> bool {
        self.levels.iter().all(|l| l.frequency(self.trials) <= slack * l.bound)
    }

    /// Whether the sample mean lies within `z` standard errors of `p ||X||^2`.
    pub fn unbiased_within(&self, z: f64) -> bool {
        (self.mean - self.expected).abs() <= z * self.std_error + 1e-12 * self.expected
    }
}

fn check_density(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Sampled energy `||P_Omega(X)||^2` for a fresh Bernoulli(p) index set.
fn sampled_energy<R: Rng + ?Sized>(squares: &[f64], p: f64, rng: &mut R) -> f64 {
    if p >= 1.0 {
        return squares.iter().sum();
    }
    squares.iter().filter(|_| rng.random::<f64>() < p).sum()
}

/// Samples `trials` independent Bernoulli(p) masks and tabulates how often
/// `||P_Omega(X)||^2` strays from `p ||X||^2` by a relative `delta` for each
/// of [`CONCENTRATION_LEVELS`].
pub fn check_concentration(x: &DenseMatrix, p: f64, trials: usize, seed: u64) -> Result<ConcentrationReport> {
    check_density(p)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial".into()));
    }
    let alpha = regularity(x)?;
    let squares: Vec<f64> = x.as_slice().iter().map(|v| v * v).collect();
    let total: f64 = squares.iter().sum();
    let expected = p * total;

    let energies: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| sampled_energy(&squares, p, &mut rng::trial_rng(seed, t as u64)))
        .collect();

    let (m, n) = x.shape();
    let levels = CONCENTRATION_LEVELS
        .iter()
        .map(|&delta| {
            let lower = energies.iter().filter(|&&e| e <= (1.0 - delta) * expected).count();
            let upper = energies.iter().filter(|&&e| e >= (1.0 + delta) * expected).count();
            ConcentrationLevel {
                delta,
                lower,
                upper,
                bound: concentration_bound(delta, p, m, n, alpha),
            }
        })
        .collect();
    let mean = energies.iter().sum::<f64>() / trials as f64;
    let var = if trials > 1 {
        energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
    } else {
        0.0
    };
    Ok(ConcentrationReport {
        trials,
        p,
        alpha,
        levels,
        mean,
        std_error: (var / trials as f64).sqrt(),
        expected,
        worst_ratio: worst_ratio(energies.iter().map(|e| e / expected)),
    })
}

fn worst_ratio(ratios: impl Iterator<Item = f64>) -> f64 {
    ratios.fold(1.0, |w: f64, r| if (r - 1.0).abs() > (w - 1.0).abs() { r } else { w })
}

/// The density `c mu^2 k^2 log n / (delta^2 m)` at which random sampling is
/// guaranteed an isometry on `mu`-incoherent rank-`k` matrices (`n >= m`).
/// Not clamped to 1.
pub fn rip_density(m: usize, n: usize, k: usize, mu: f64, delta: f64, c: f64) -> f64 {
    let big = m.max(n) as f64;
    c * mu * mu * (k * k) as f64 * big.ln() / (delta * delta * m.min(n) as f64)
}

/// Draws `trials` random `mu`-incoherent rank-`k` matrices, each with its own
/// Bernoulli(p) mask, and counts violations of the sampled isometry at level
/// `delta`.
#[allow(clippy::too_many_arguments)]
pub fn check_rip_incoherent(
    m: usize,
    n: usize,
    k: usize,
    mu: f64,
    p: f64,
    delta: f64,
    trials: usize,
    seed: u64,
) -> Result<RipCheckReport> {
    check_density(p)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta {delta} outside (0, 1)")));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial".into()));
    }
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let mut g = rng::trial_rng(seed, t as u64);
            let x = random_incoherent(m, n, k, mu, &mut g)?;
            let squares: Vec<f64> = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| x.entry(i, j).powi(2))
                .collect();
            let total = x.frobenius_norm().powi(2);
            Ok(sampled_energy(&squares, p, &mut g) / (p * total))
        })
        .collect::<Result<_>>()?;
    let violations = ratios
        .iter()
        .filter(|&&r| r < 1.0 - delta || r > 1.0 + delta)
        .count();
    Ok(RipCheckReport {
        trials,
        violations,
        worst_ratio: worst_ratio(ratios.into_iter()),
        m,
        n,
        k,
        mu,
        p,
        delta,
    })
}
