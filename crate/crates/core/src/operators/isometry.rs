use rand::Rng;

use crate::matrix::{DenseMatrix, LowRankFactorization};
use crate::operators::AffineMap;
use crate::rng;

/// A random rank-`k` matrix with unit Frobenius norm: the product of two
/// i.i.d. Gaussian factors, normalized.
pub fn random_unit_rank_k<R: Rng + ?Sized>(m: usize, n: usize, k: usize, rng: &mut R) -> LowRankFactorization {
    let left = DenseMatrix::random_gaussian(m, k, rng);
    let right = DenseMatrix::random_gaussian(n, k, rng);
    let x = LowRankFactorization::from_factors(&left, &right).expect("k <= min(m, n)");
    let norm = x.frobenius_norm();
    x.scaled(1.0 / norm)
}

/// Empirical lower bound on the rank-`k` isometry constant of `map`:
/// `max |‖A(X)‖^2 - 1|` over `trials` random unit-norm rank-`k` matrices.
///
/// Draws come from one stream, so more trials never lower the estimate.
pub fn estimate_isometry_constant<A: AffineMap + ?Sized>(map: &A, k: usize, trials: usize, seed: u64) -> f64 {
    assert!(trials >= 1, "at least one trial");
    let k = k.min(map.rows().min(map.cols()));
    let mut rng = rng::seeded(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x = random_unit_rank_k(map.rows(), map.cols(), k, &mut rng);
        let energy: f64 = map.apply_lowrank(&x).iter().map(|v| v * v).sum();
        worst = worst.max((energy - 1.0).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{gaussian_ensemble, sample_entries, SamplingModel};

    #[test]
    fn full_observation_is_an_exact_isometry() {
        let map = sample_entries(6, 5, SamplingModel::FixedCount { count: 30 }, 0).unwrap();
        assert!(estimate_isometry_constant(&map, 2, 50, 1) < 1e-10);
    }

    #[test]
    fn estimate_grows_with_trials() {
        let map = gaussian_ensemble(10, 10, 120, 4).unwrap();
        let one = estimate_isometry_constant(&map, 2, 1, 9);
        let many = estimate_isometry_constant(&map, 2, 100, 9);
        assert!(one <= many);
    }

    #[test]
    fn unit_rank_k_has_unit_norm() {
        let x = random_unit_rank_k(7, 9, 3, &mut rng::seeded(1));
        assert!((x.frobenius_norm() - 1.0).abs() < 1e-12);
        assert!((x.to_dense().frobenius_norm() - 1.0).abs() < 1e-12);
        assert_eq!(x.rank(1e-12), 3);
    }
}
