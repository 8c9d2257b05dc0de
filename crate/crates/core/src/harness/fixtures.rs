//! Ground-truth matrices and measurement instances shared by the experiments.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::analysis::random_incoherent;
use crate::error::Result;
use crate::harness::NoiseModel;
use crate::matrix::{full_svd, DenseMatrix, LowRankFactorization};
use crate::operators::{random_unit_rank_k, sample_entries, AffineMap, EntrySamplingMap, SamplingModel};

/// Rank-`k` product of Gaussian factors, scaled to unit RMS entry.
pub fn lowrank_truth<R: Rng + ?Sized>(m: usize, n: usize, k: usize, rng: &mut R) -> LowRankFactorization {
    random_unit_rank_k(m, n, k, rng).scaled(((m * n) as f64).sqrt())
}

/// `mu`-incoherent rank-`k` matrix scaled to unit RMS entry.
pub fn incoherent_truth<R: Rng + ?Sized>(m: usize, n: usize, k: usize, mu: f64, rng: &mut R) -> Result<LowRankFactorization> {
    let x = random_incoherent(m, n, k, mu, rng)?;
    let norm = x.frobenius_norm();
    Ok(x.scaled(((m * n) as f64).sqrt() / norm))
}

/// RMSE of `x` against `truth` over all entries.
pub fn rmse(x: &LowRankFactorization, truth: &LowRankFactorization) -> f64 {
    x.distance(truth) / ((truth.rows() * truth.cols()) as f64).sqrt()
}

/// RMSE over the entries of a set.
pub fn rmse_on(x: &LowRankFactorization, entries: &crate::matrix::EntrySet) -> f64 {
    let sq: f64 = entries.iter().map(|(i, j, v)| (x.entry(i, j) - v).powi(2)).sum();
    (sq / entries.len().max(1) as f64).sqrt()
}

/// Adds noise to `values` in place and returns `||e||^2`.
pub fn add_noise<R: Rng + ?Sized>(values: &mut [f64], noise: &NoiseModel, rng: &mut R) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt();
    let mut energy = 0.0;
    match *noise {
        NoiseModel::Gaussian { level } => {
            let normal = Normal::new(0.0, level * rms).expect("finite nonnegative deviation");
            for v in values.iter_mut() {
                let e = normal.sample(rng);
                *v += e;
                energy += e * e;
            }
        }
        NoiseModel::Outlier { fraction, magnitude } => {
            for v in values.iter_mut() {
                if rng.random::<f64>() < fraction {
                    let e = if rng.random::<bool>() { magnitude * rms } else { -magnitude * rms };
                    *v += e;
                    energy += e * e;
                }
            }
        }
    }
    energy
}

/// A completion problem: truth, Bernoulli mask and (possibly noisy) observations.
#[derive(Clone, Debug)]
pub struct CompletionInstance {
    pub truth: LowRankFactorization,
    pub map: EntrySamplingMap,
    pub observed: Vec<f64>,
    /// `||e||^2` of the added noise.
    pub noise_energy: f64,
}

/// Draws an incoherent `n x n` rank-`k` truth and a Bernoulli(p) mask.
///
/// The truth depends only on `truth_seed` and the mask only on `mask_seed`,
/// so sweeping `p` with fixed seeds gives nested masks over one truth.
pub fn completion_instance(
    n: usize,
    k: usize,
    p: f64,
    mu: f64,
    noise: Option<&NoiseModel>,
    truth_seed: u64,
    mask_seed: u64,
) -> Result<CompletionInstance> {
    let mut rng = crate::rng::seeded(truth_seed);
    let truth = incoherent_truth(n, n, k, mu, &mut rng)?;
    let map = sample_entries(n, n, SamplingModel::Bernoulli { p }, mask_seed)?;
    let mut observed = map.apply_lowrank(&truth);
    let noise_energy = match noise {
        Some(model) => add_noise(&mut observed, model, &mut crate::rng::seeded(mask_seed ^ 0x6e6f_6973_65)),
        None => 0.0,
    };
    Ok(CompletionInstance {
        truth,
        map,
        observed,
        noise_energy,
    })
}

/// A 38 x 73 binary image of rank 4: vertical strokes whose row spans take
/// four linearly independent patterns.
pub fn logo_image() -> DenseMatrix {
    // row spans of the four stroke types
    let spans = [(4, 34), (4, 12), (14, 34), (4, 24)];
    // (first column, last column exclusive, stroke type)
    let strokes = [
        (2, 6, 0),
        (6, 9, 1),
        (9, 12, 3),
        (12, 15, 1),
        (15, 19, 0),
        (24, 28, 2),
        (32, 36, 1),
        (36, 40, 0),
        (40, 44, 1),
        (49, 53, 0),
        (53, 59, 3),
        (62, 70, 2),
    ];
    DenseMatrix::from_fn(38, 73, |i, j| {
        strokes
            .iter()
            .find(|&&(lo, hi, _)| (lo..hi).contains(&j))
            .map_or(0.0, |&(_, _, s)| {
                let (top, bottom) = spans[s];
                if (top..bottom).contains(&i) {
                    1.0
                } else {
                    0.0
                }
            })
    })
}

/// The logo as an exact rank-4 factorization.
pub fn logo_truth() -> Result<LowRankFactorization> {
    Ok(full_svd(&logo_image())?.truncated(4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logo_has_rank_four() {
        let img = logo_image();
        assert_eq!(img.shape(), (38, 73));
        assert!(img.as_slice().iter().all(|&v| v == 0.0 || v == 1.0));
        let svd = full_svd(&img).unwrap();
        assert_eq!(svd.rank(1e-10), 4);
        let truth = logo_truth().unwrap();
        assert!(truth.to_dense().sub(&img).frobenius_norm() < 1e-10);
    }

    #[test]
    fn truths_have_unit_rms() {
        let mut g = crate::rng::seeded(0);
        let a = lowrank_truth(30, 20, 3, &mut g);
        assert!((a.frobenius_norm() - 600f64.sqrt()).abs() < 1e-9);
        let b = incoherent_truth(40, 40, 2, 3.0, &mut g).unwrap();
        assert!((b.frobenius_norm() - 40.0).abs() < 1e-9);
    }

    #[test]
    fn outliers_hit_requested_fraction() {
        let mut g = crate::rng::seeded(1);
        let mut v = vec![1.0; 20_000];
        let energy = add_noise(
            &mut v,
            &NoiseModel::Outlier {
                fraction: 0.1,
                magnitude: 3.0,
            },
            &mut g,
        );
        let hit = v.iter().filter(|&&x| x != 1.0).count() as f64 / 20_000.0;
        assert!((hit - 0.1).abs() < 0.01);
        assert!((energy - hit * 20_000.0 * 9.0).abs() < 1e-6);
    }
}
