use crate::error::{Error, Result};
use crate::matrix::factor::{jacobi_svd, thin_qr};
use crate::matrix::DenseMatrix;

/// A rank-`k` matrix `U diag(sigma) V^T` with orthonormal `U` (`m x k`),
/// orthonormal `V` (`n x k`) and nonincreasing nonnegative `sigma`.
#[derive(Clone, Debug, PartialEq)]
pub struct LowRankFactorization {
    u: DenseMatrix,
    sigma: Vec<f64>,
    v: DenseMatrix,
}

impl LowRankFactorization {
    /// Checks shapes, ordering and finiteness. Orthonormality is the caller's
    /// responsibility; see [`LowRankFactorization::orthonormality_error`].
    pub fn new(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> Result<Self> {
        let k = sigma.len();
        if u.cols() != k || v.cols() != k {
            return Err(Error::DimensionMismatch(format!(
                "U has {} columns, V has {}, sigma has {k} values",
                u.cols(),
                v.cols()
            )));
        }
        if sigma.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::InvalidArgument("singular values must be finite and nonnegative".into()));
        }
        if sigma.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument("singular values must be nonincreasing".into()));
        }
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::NonFinite("LowRankFactorization::new"));
        }
        Ok(LowRankFactorization { u, sigma, v })
    }

    pub(crate) fn from_parts_unchecked(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> Self {
        debug_assert_eq!(u.cols(), sigma.len());
        debug_assert_eq!(v.cols(), sigma.len());
        LowRankFactorization { u, sigma, v }
    }

    /// The zero matrix carried as `k` zero triplets.
    pub fn zeros(rows: usize, cols: usize, k: usize) -> Self {
        let u = DenseMatrix::from_fn(rows, k, |i, j| if i == j { 1.0 } else { 0.0 });
        let v = DenseMatrix::from_fn(cols, k, |i, j| if i == j { 1.0 } else { 0.0 });
        LowRankFactorization {
            u,
            sigma: vec![0.0; k],
            v,
        }
    }

    /// Orthonormal factorization of `left * right^T` for arbitrary `left`
    /// (`m x r`) and `right` (`n x r`).
    pub fn from_factors(left: &DenseMatrix, right: &DenseMatrix) -> Result<Self> {
        if left.cols() != right.cols() {
            return Err(Error::DimensionMismatch(format!(
                "factor ranks differ: {} vs {}",
                left.cols(),
                right.cols()
            )));
        }
        let r = left.cols();
        if r > left.rows() || r > right.rows() {
            return Err(Error::InvalidArgument(format!(
                "factor rank {r} exceeds matrix dimensions {}x{}",
                left.rows(),
                right.rows()
            )));
        }
        let (ql, rl) = thin_qr(left);
        let (qr, rr) = thin_qr(right);
        let core = rl.matmul(&rr.transpose());
        let (uc, sigma, vc) = jacobi_svd(&core);
        Ok(LowRankFactorization {
            u: ql.matmul(&uc),
            sigma,
            v: qr.matmul(&vc),
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.u.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.v.rows()
    }

    /// Number of retained triplets (trailing zeros included).
    #[inline]
    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Numerical rank: singular values above `rel_tol * sigma[0]`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.sigma.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|&&s| s > rel_tol * top).count()
    }

    /// `X_ij` in `O(k)`.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let ur = self.u.row(i);
        let vr = self.v.row(j);
        let mut acc = 0.0;
        for l in 0..self.sigma.len() {
            acc += ur[l] * self.sigma[l] * vr[l];
        }
        acc
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let us = DenseMatrix::from_fn(self.rows(), self.k(), |i, l| self.u[(i, l)] * self.sigma[l]);
        us.matmul(&self.v.transpose())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.sigma.iter().map(|s| s * s).sum::<f64>().sqrt()
    }

    /// `c * X`, keeping singular values nonnegative.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.sigma.iter_mut().for_each(|s| *s *= c.abs());
        if c < 0.0 {
            out.u.scale(-1.0);
        }
        out
    }

    /// Keeps the leading `k` triplets.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.k());
        LowRankFactorization {
            u: self.u.leading_columns(k),
            sigma: self.sigma[..k].to_vec(),
            v: self.v.leading_columns(k),
        }
    }

    /// `max(||U^T U - I||_F, ||V^T V - I||_F)`.
    pub fn orthonormality_error(&self) -> f64 {
        self.u.orthonormality_error().max(self.v.orthonormality_error())
    }

    /// `||self - other||_F` without materializing either matrix when both are thin.
    pub fn distance(&self, other: &LowRankFactorization) -> f64 {
        // ||A||^2 + ||B||^2 - 2 <A, B>, with <A, B> = tr(S_a U_a^T U_b S_b V_b^T V_a)
        let uu = self.u.tr_matmul(&other.u);
        let vv = self.v.tr_matmul(&other.v);
        let mut cross = 0.0;
        for a in 0..self.k() {
            for b in 0..other.k() {
                cross += self.sigma[a] * uu[(a, b)] * other.sigma[b] * vv[(a, b)];
            }
        }
        let sq = self.frobenius_norm().powi(2) + other.frobenius_norm().powi(2) - 2.0 * cross;
        if sq > 1e-8 * (self.frobenius_norm().powi(2) + other.frobenius_norm().powi(2)) {
            sq.sqrt()
        } else {
            // cancellation regime
            self.to_dense().sub(&other.to_dense()).frobenius_norm()
        }
    }
}
