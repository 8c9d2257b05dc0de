//! Singular value decompositions.
//!
//! [`full_svd`] is a dense reference decomposition for small matrices and
//! serves as the oracle in tests. [`truncated_svd`] computes the leading
//! triplets of any [`LinearOperator`] by randomized block subspace iteration
//! with Rayleigh-Ritz extraction, touching the operator only through block
//! products. [`project_rank_k`] is the best rank-`k` approximation built on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::factor::{jacobi_svd, orthonormalize, thin_qr};
use crate::matrix::{DenseMatrix, LinearOperator, LowRankFactorization};

/// Largest dimension accepted by [`full_svd`].
pub const ORACLE_LIMIT: usize = 512;

/// Tuning for [`truncated_svd_with`].
#[derive(Clone, Debug)]
pub struct SvdOptions {
    /// Stop once every leading residual `||Y v_i - s_i u_i||` is below `tol * s_1`.
    pub tol: f64,
    pub max_inner: usize,
    /// Extra block columns beyond `k`.
    pub oversample: usize,
    pub seed: u64,
    /// Return the last Ritz triplets instead of failing when `tol` is not
    /// reached within `max_inner` iterations. The achieved residual is reported.
    pub best_effort: bool,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions {
            tol: 1e-10,
            max_inner: 300,
            oversample: 10,
            seed: 0x5eed_5eed,
            best_effort: false,
        }
    }
}

/// Output of [`truncated_svd_with`].
#[derive(Clone, Debug)]
pub struct TruncatedSvd {
    pub factors: LowRankFactorization,
    /// Ritz estimates of the singular values after the leading `k`.
    pub trailing: Vec<f64>,
    /// Orthonormal right basis of the whole block; a good warm start for a nearby operator.
    pub basis: DenseMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Dense SVD for matrices up to [`ORACLE_LIMIT`] in each dimension.
pub fn full_svd(x: &DenseMatrix) -> Result<LowRankFactorization> {
    let (m, n) = x.shape();
    if m > ORACLE_LIMIT || n > ORACLE_LIMIT {
        return Err(Error::DimensionOverflow {
            rows: m,
            cols: n,
            limit: ORACLE_LIMIT,
        });
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("full_svd input"));
    }
    let svd = nalgebra::SVD::new(x.to_nalgebra(), true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    let r = svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma = order.iter().map(|&l| svd.singular_values[l].max(0.0)).collect();
    let um = DenseMatrix::from_fn(m, r, |i, j| u[(i, order[j])]);
    let vm = DenseMatrix::from_fn(n, r, |i, j| vt[(order[j], i)]);
    Ok(LowRankFactorization::from_parts_unchecked(um, sigma, vm))
}

/// Top-`k` singular triplets of `op`.
pub fn truncated_svd<O: LinearOperator + ?Sized>(
    op: &O,
    k: usize,
    tol: f64,
    max_inner: usize,
) -> Result<LowRankFactorization> {
    let opts = SvdOptions {
        tol,
        max_inner,
        ..SvdOptions::default()
    };
    truncated_svd_with(op, k, &opts, None).map(|t| t.factors)
}

/// Top-`k` singular triplets with explicit options and an optional warm-start
/// right basis (`ncols x r`, any `r`; extra columns are filled randomly).
pub fn truncated_svd_with<O: LinearOperator + ?Sized>(
    op: &O,
    k: usize,
    opts: &SvdOptions,
    warm_start: Option<&DenseMatrix>,
) -> Result<TruncatedSvd> {
    let (m, n) = (op.nrows(), op.ncols());
    let min_dim = m.min(n);
    if k == 0 || k > min_dim {
        return Err(Error::InvalidArgument(format!(
            "k = {k} must satisfy 1 <= k <= min({m}, {n})"
        )));
    }
    if k == min_dim {
        return full_rank(op, k);
    }

    let b = (k + opts.oversample).min(min_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start = DenseMatrix::random_gaussian(n, b, &mut rng);
    if let Some(w) = warm_start {
        if w.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "warm start has {} rows, operator has {n} columns",
                w.rows()
            )));
        }
        for i in 0..n {
            for j in 0..w.cols().min(b) {
                start[(i, j)] = w[(i, j)];
            }
        }
    }
    let z = orthonormalize(&start);
    let mut w = op.apply_block(&z);
    if !w.is_finite() {
        return Err(Error::NonFinite("truncated_svd operator product"));
    }

    let mut residual = f64::INFINITY;
    let mut last = None;
    for it in 1..=opts.max_inner {
        let q = orthonormalize(&w);
        let s = op.apply_transpose_block(&q);
        // Rayleigh-Ritz on span(Q): Q^T Y = S^T = R^T Z2^T
        let (z2, r) = thin_qr(&s);
        let (ur, sigma, vr) = jacobi_svd(&r);
        let v = z2.matmul(&ur);
        let u = q.matmul(&vr);
        w = op.apply_block(&v);

        let top = sigma[0];
        residual = if top == 0.0 {
            0.0
        } else {
            (0..k)
                .map(|i| {
                    let mut acc = 0.0;
                    for row in 0..m {
                        let d = w[(row, i)] - sigma[i] * u[(row, i)];
                        acc += d * d;
                    }
                    acc.sqrt()
                })
                .fold(0.0, f64::max)
                / top
        };
        let done = residual <= opts.tol;
        if done || (opts.best_effort && it == opts.max_inner) {
            let factors =
                LowRankFactorization::from_parts_unchecked(u.leading_columns(k), sigma[..k].to_vec(), v.leading_columns(k));
            last = Some(TruncatedSvd {
                factors,
                trailing: sigma[k..].to_vec(),
                basis: v,
                iterations: it,
                residual,
            });
        }
        if done {
            break;
        }
    }
    if let Some(out) = last {
        if out.residual > opts.tol {
            log::warn!(
                "truncated SVD stopped at residual {:.2e} after {} iterations (tol {:.1e})",
                out.residual,
                out.iterations,
                opts.tol
            );
        }
        return Ok(out);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_inner,
        residual,
        tol: opts.tol,
    })
}

fn full_rank<O: LinearOperator + ?Sized>(op: &O, k: usize) -> Result<TruncatedSvd> {
    let (m, n) = (op.nrows(), op.ncols());
    if m > ORACLE_LIMIT || n > ORACLE_LIMIT {
        return Err(Error::DimensionOverflow {
            rows: m,
            cols: n,
            limit: ORACLE_LIMIT,
        });
    }
    let factors = full_svd(&op.materialize())?;
    let basis = factors.v().clone();
    Ok(TruncatedSvd {
        factors: factors.truncated(k),
        trailing: Vec::new(),
        basis,
        iterations: 0,
        residual: 0.0,
    })
}

/// Best rank-`k` approximation in Frobenius norm (Eckart-Young).
pub fn project_rank_k<O: LinearOperator + ?Sized>(op: &O, k: usize) -> Result<LowRankFactorization> {
    if k == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let k = k.min(op.nrows().min(op.ncols()));
    truncated_svd_with(op, k, &SvdOptions::default(), None).map(|t| t.factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{EntrySet, StructuredOperand};
    use rand::Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn full_svd_diagonal() {
        let f = full_svd(&DenseMatrix::from_diagonal(&[3.0, 1.0])).unwrap();
        assert_eq!(f.sigma(), &[3.0, 1.0]);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((f.u()[(i, j)].abs() - expected).abs() < 1e-14);
                assert!((f.v()[(i, j)].abs() - expected).abs() < 1e-14);
            }
        }
        assert!(f.to_dense().sub(&DenseMatrix::from_diagonal(&[3.0, 1.0])).max_abs() < 1e-14);
    }

    #[test]
    fn full_svd_rank_one() {
        let u = [0.6, 0.8];
        let v = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt()];
        let x = DenseMatrix::from_fn(2, 2, |i, j| u[i] * v[j]);
        let f = full_svd(&x).unwrap();
        assert!((f.sigma()[0] - x.frobenius_norm()).abs() < 1e-14);
        assert!(f.sigma()[1].abs() < 1e-14);
    }

    #[test]
    fn full_svd_reconstructs_random() {
        let x = DenseMatrix::random_gaussian(8, 6, &mut rng(2));
        let f = full_svd(&x).unwrap();
        assert!(f.sigma().windows(2).all(|w| w[0] >= w[1]));
        assert!(f.to_dense().sub(&x).frobenius_norm() <= 1e-8 * x.frobenius_norm());
        assert!(matches!(
            full_svd(&DenseMatrix::zeros(513, 2)),
            Err(Error::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn truncated_recovers_rank_two_operand() {
        let mut r = rng(4);
        let l = LowRankFactorization::from_factors(
            &DenseMatrix::random_gaussian(20, 2, &mut r),
            &DenseMatrix::random_gaussian(15, 2, &mut r),
        )
        .unwrap();
        let op = StructuredOperand::lowrank(l.clone());
        let t = truncated_svd_with(&op, 2, &SvdOptions::default(), None).unwrap();
        for (a, b) in t.factors.sigma().iter().zip(l.sigma()) {
            assert!((a - b).abs() <= 1e-10 * b);
        }
        assert!(t.trailing[0] <= 1e-10 * l.sigma()[0]);
        assert!(t.factors.distance(&l) <= 1e-9 * l.frobenius_norm());
    }

    #[test]
    fn truncated_matches_oracle_on_dense() {
        let x = DenseMatrix::random_gaussian(30, 30, &mut rng(5));
        let op = StructuredOperand::from_dense(&x);
        let t = truncated_svd(&op, 3, 1e-10, 300).unwrap();
        let f = full_svd(&x).unwrap();
        for i in 0..3 {
            assert!((t.sigma()[i] - f.sigma()[i]).abs() <= 1e-6 * f.sigma()[i]);
        }
        assert!(t.orthonormality_error() < 1e-8);
    }

    #[test]
    fn truncated_lowrank_plus_sparse_matches_materialized() {
        let mut r = rng(6);
        let l = LowRankFactorization::from_factors(
            &DenseMatrix::random_gaussian(25, 3, &mut r),
            &DenseMatrix::random_gaussian(20, 3, &mut r),
        )
        .unwrap();
        let mut triples = Vec::new();
        for i in 0..25 {
            for j in 0..20 {
                if r.random::<f64>() < 0.1 {
                    triples.push((i, j, r.random::<f64>() * 2.0 - 1.0));
                }
            }
        }
        let op = StructuredOperand::new(Some((1.0, l)), Some((1.0, EntrySet::new(25, 20, triples).unwrap()))).unwrap();
        let t = truncated_svd(&op, 3, 1e-10, 300).unwrap();
        let f = full_svd(&op.to_dense()).unwrap();
        for i in 0..3 {
            assert!((t.sigma()[i] - f.sigma()[i]).abs() <= 1e-6 * f.sigma()[i]);
        }
    }

    #[test]
    fn project_diagonal_truncation() {
        let x = DenseMatrix::from_diagonal(&[5.0, 4.0, 3.0, 2.0, 1.0]);
        let p = project_rank_k(&x, 2).unwrap().to_dense();
        assert!(p.sub(&DenseMatrix::from_diagonal(&[5.0, 4.0, 0.0, 0.0, 0.0])).max_abs() < 1e-10);
    }

    #[test]
    fn project_is_fixed_point_on_low_rank() {
        let mut r = rng(8);
        let x = DenseMatrix::random_gaussian(12, 2, &mut r).matmul(&DenseMatrix::random_gaussian(2, 9, &mut r));
        let p = project_rank_k(&x, 3).unwrap().to_dense();
        assert!(p.sub(&x).frobenius_norm() < 1e-10 * x.frobenius_norm().max(1.0));
    }

    #[test]
    fn full_rank_request_delegates_to_oracle() {
        let x = DenseMatrix::random_gaussian(6, 4, &mut rng(9));
        let p = project_rank_k(&x, 4).unwrap().to_dense();
        assert!(p.sub(&x).frobenius_norm() < 1e-10);
    }

    #[test]
    fn zero_operator_converges_immediately() {
        let t = truncated_svd_with(&DenseMatrix::zeros(10, 8), 2, &SvdOptions::default(), None).unwrap();
        assert_eq!(t.factors.sigma(), &[0.0, 0.0]);
        assert!(t.factors.orthonormality_error() < 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let x = DenseMatrix::random_gaussian(60, 60, &mut rng(10));
        let opts = SvdOptions {
            tol: 1e-14,
            max_inner: 2,
            oversample: 0,
            ..SvdOptions::default()
        };
        assert!(matches!(
            truncated_svd_with(&x, 5, &opts, None),
            Err(Error::NonConvergence { .. })
        ));
    }
}
