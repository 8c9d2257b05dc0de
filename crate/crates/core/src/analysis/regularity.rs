use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Smallest `alpha` with `max|X_ij| <= alpha / sqrt(mn) * ||X||_F`.
///
/// Ranges from 1 (all entries equal in magnitude) to `sqrt(mn)` (one spike).
pub fn regularity(x: &DenseMatrix) -> Result<f64> {
    let fro = x.frobenius_norm();
    if fro == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let (m, n) = x.shape();
    Ok(x.max_abs() * ((m * n) as f64).sqrt() / fro)
}

/// Bernstein tail bound `2 exp(-delta^2 p mn / (3 alpha^2))`.
pub fn concentration_bound(delta: f64, p: f64, m: usize, n: usize, alpha: f64) -> f64 {
    2.0 * (-(delta * delta * p * (m * n) as f64) / (3.0 * alpha * alpha)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_and_spike_extremes() {
        let ones = DenseMatrix::from_fn(6, 9, |_, _| -2.5);
        assert!((regularity(&ones).unwrap() - 1.0).abs() < 1e-12);
        let spike = DenseMatrix::from_fn(6, 9, |i, j| if (i, j) == (3, 4) { 7.0 } else { 0.0 });
        assert!((regularity(&spike).unwrap() - 54f64.sqrt()).abs() < 1e-12);
        assert!(matches!(regularity(&DenseMatrix::zeros(2, 2)), Err(Error::ZeroMatrix)));
    }

    #[test]
    fn bound_for_all_ones_is_tiny() {
        let b = concentration_bound(0.3, 0.2, 100, 100, 1.0);
        assert!(b > 1e-27 && b < 1e-25, "{b}");
    }
}
