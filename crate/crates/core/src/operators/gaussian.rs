use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, LowRankFactorization};
use crate::operators::AffineMap;
use crate::rng;

/// `d` dense measurement matrices with i.i.d. `N(0, 1/d)` entries, so that
/// `E ||A(X)||^2 = ||X||_F^2`.
#[derive(Clone, Debug)]
pub struct GaussianEnsemble {
    rows: usize,
    cols: usize,
    d: usize,
    seed: u64,
    // d x (rows * cols), one flattened (row-major) A_i per row
    data: Vec<f64>,
}

/// Draws a Gaussian ensemble; identical `(m, n, d, seed)` give identical maps.
pub fn gaussian_ensemble(m: usize, n: usize, d: usize, seed: u64) -> Result<GaussianEnsemble> {
    GaussianEnsemble::new(m, n, d, seed)
}

impl GaussianEnsemble {
    pub fn new(m: usize, n: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::NoMeasurements);
        }
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!("empty ambient space {m}x{n}")));
        }
        let normal = Normal::new(0.0, 1.0 / (d as f64).sqrt()).expect("positive std");
        let mut rng = rng::seeded(seed);
        let data = (0..d * m * n).map(|_| normal.sample(&mut rng)).collect();
        Ok(GaussianEnsemble {
            rows: m,
            cols: n,
            d,
            seed,
            data,
        })
    }

    /// Stored entries needed for an `m x n` ensemble with `d` measurements.
    pub fn storage(m: usize, n: usize, d: usize) -> usize {
        m * n * d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The `i`-th measurement matrix.
    pub fn measurement_matrix(&self, i: usize) -> DenseMatrix {
        let len = self.rows * self.cols;
        DenseMatrix::from_row_major(self.rows, self.cols, self.data[i * len..(i + 1) * len].to_vec())
            .expect("valid stored matrix")
    }

    fn check(&self, x: &DenseMatrix) {
        assert_eq!(
            x.shape(),
            (self.rows, self.cols),
            "operand shape does not match the ensemble"
        );
    }
}

impl AffineMap for GaussianEnsemble {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn measurements(&self) -> usize {
        self.d
    }

    fn apply(&self, x: &DenseMatrix) -> Vec<f64> {
        self.check(x);
        let xs = x.as_slice();
        self.data
            .chunks_exact(xs.len())
            .map(|a| a.iter().zip(xs).map(|(p, q)| p * q).sum())
            .collect()
    }

    fn adjoint(&self, y: &[f64]) -> DenseMatrix {
        assert_eq!(y.len(), self.d, "adjoint input has wrong length");
        let len = self.rows * self.cols;
        let mut out = vec![0.0; len];
        for (a, &yi) in self.data.chunks_exact(len).zip(y) {
            if yi == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(a) {
                *o += yi * p;
            }
        }
        DenseMatrix::from_row_major(self.rows, self.cols, out).expect("finite adjoint")
    }

    fn apply_lowrank(&self, x: &LowRankFactorization) -> Vec<f64> {
        self.apply(&x.to_dense())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_linear() {
        let a = gaussian_ensemble(4, 5, 30, 1).unwrap();
        let b = gaussian_ensemble(4, 5, 30, 1).unwrap();
        assert_eq!(a.data, b.data);
        assert!(a.apply(&DenseMatrix::zeros(4, 5)).iter().all(|&v| v == 0.0));
        let mut r = rng::seeded(2);
        let x = DenseMatrix::random_gaussian(4, 5, &mut r);
        let y = DenseMatrix::random_gaussian(4, 5, &mut r);
        let mut comb = x.scaled(2.0);
        comb.add_scaled(-3.0, &y);
        let lhs = a.apply(&comb);
        let (ax, ay) = (a.apply(&x), a.apply(&y));
        for i in 0..30 {
            assert!((lhs[i] - (2.0 * ax[i] - 3.0 * ay[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_is_trace_inner_product() {
        let a = gaussian_ensemble(3, 2, 5, 3).unwrap();
        let x = DenseMatrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64);
        let b = a.apply(&x);
        for i in 0..5 {
            // Tr(A_i^T X)
            let ai = a.measurement_matrix(i);
            let tr = ai.tr_matmul(&x);
            let trace: f64 = (0..2).map(|l| tr[(l, l)]).sum();
            assert!((b[i] - trace).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_measurements_rejected() {
        assert!(matches!(gaussian_ensemble(3, 3, 0, 0), Err(Error::NoMeasurements)));
    }
}
