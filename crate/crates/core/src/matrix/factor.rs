//! Small dense factorizations used by the low-rank machinery: column
//! orthonormalization, thin QR and a one-sided Jacobi SVD for the
//! Rayleigh-Ritz cores of the subspace iteration.

use crate::matrix::DenseMatrix;

const DEFICIENT_REL: f64 = 1e-12;

/// Thin QR of a tall `m x r` matrix by classical Gram-Schmidt with one
/// reorthogonalization pass. Rank-deficient columns get `R[j][j] = 0` and an
/// arbitrary unit vector orthogonal to the preceding ones, so `Q` always has
/// orthonormal columns.
pub fn thin_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let (m, r) = a.shape();
    assert!(r <= m, "thin_qr needs a tall matrix, got {m}x{r}");
    // columns as contiguous rows
    let at = a.transpose();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut rmat = DenseMatrix::zeros(r, r);
    let mut filler = 0usize;
    for j in 0..r {
        let mut v = at.row(j).to_vec();
        let orig = norm(&v);
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dot(qi, &v);
                rmat[(i, j)] += c;
                axpy(-c, qi, &mut v);
            }
        }
        let nv = norm(&v);
        if orig > 0.0 && nv > DEFICIENT_REL * orig && nv > f64::MIN_POSITIVE {
            v.iter_mut().for_each(|x| *x /= nv);
            rmat[(j, j)] = nv;
            q.push(v);
        } else {
            rmat[(j, j)] = 0.0;
            let (unit, next) = orthogonal_filler(&q, m, filler);
            filler = next;
            q.push(unit);
        }
    }
    let qmat = DenseMatrix::from_fn(m, r, |i, j| q[j][i]);
    (qmat, rmat)
}

/// Orthonormal basis for the column span of `a` (plus fillers when deficient).
pub fn orthonormalize(a: &DenseMatrix) -> DenseMatrix {
    thin_qr(a).0
}

/// A unit vector orthogonal to every vector in `basis`, drawn from the
/// standard basis starting at `start`.
fn orthogonal_filler(basis: &[Vec<f64>], m: usize, start: usize) -> (Vec<f64>, usize) {
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    for offset in 0..m {
        let l = (start + offset) % m;
        let mut v = vec![0.0; m];
        v[l] = 1.0;
        for _ in 0..2 {
            for qi in basis {
                let c = dot(qi, &v);
                axpy(-c, qi, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > 0.5 {
            v.iter_mut().for_each(|x| *x /= nv);
            return (v, l + 1);
        }
        if best.as_ref().is_none_or(|(b, _, _)| nv > *b) {
            best = Some((nv, v, l + 1));
        }
    }
    let (nv, mut v, next) = best.expect("m > 0");
    v.iter_mut().for_each(|x| *x /= nv);
    (v, next)
}

/// Thin SVD `a = U diag(sigma) V^T` of a tall or square matrix by one-sided
/// (Hestenes) Jacobi rotations. Singular values come back nonincreasing; `U`
/// is completed to orthonormal columns when `a` is rank deficient.
pub fn jacobi_svd(a: &DenseMatrix) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
    let (r, c) = a.shape();
    assert!(c <= r, "jacobi_svd needs a tall matrix, got {r}x{c}");
    let mut cols: Vec<Vec<f64>> = (0..c).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..c)
        .map(|j| {
            let mut e = vec![0.0; c];
            e[j] = 1.0;
            e
        })
        .collect();

    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..c {
            for q in p + 1..c {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate(&mut cols, p, q, cs, sn);
                rotate(&mut v, p, q, cs, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..c).collect();
    let sig: Vec<f64> = cols.iter().map(|col| norm(col)).collect();
    order.sort_by(|&x, &y| sig[y].total_cmp(&sig[x]));

    let scale = sig.iter().cloned().fold(0.0, f64::max);
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(c);
    let mut sigma = Vec::with_capacity(c);
    let mut pending = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if sig[j] > 1e-300 && sig[j] > 1e-15 * scale {
            u_cols.push(cols[j].iter().map(|x| x / sig[j]).collect());
            sigma.push(sig[j]);
        } else {
            u_cols.push(Vec::new());
            sigma.push(0.0);
            pending.push(slot);
        }
    }
    if !pending.is_empty() {
        let mut filler = 0;
        for slot in pending {
            let basis: Vec<Vec<f64>> = u_cols.iter().filter(|u| !u.is_empty()).cloned().collect();
            let (unit, next) = orthogonal_filler(&basis, r, filler);
            filler = next;
            u_cols[slot] = unit;
        }
    }
    let u = DenseMatrix::from_fn(r, c, |i, j| u_cols[j][i]);
    let vm = DenseMatrix::from_fn(c, c, |i, j| v[order[j]][i]);
    (u, sigma, vm)
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, cs: f64, sn: f64) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = cs * a - sn * b;
        *y = sn * a + cs * b;
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}
