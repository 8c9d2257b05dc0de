//! Computable forms of the convergence guarantees, evaluated at an estimated
//! isometry constant `delta`.

/// Iterations needed to reach `||A(X) - b||^2 <= eps` in the noiseless
/// regime: `ceil(log(||b||^2 / (2 eps)) / log((1 - delta) / (2 delta)))`.
///
/// `None` when `delta >= 1/3`, where the contraction factor is not below 1.
pub fn iteration_bound(b_squared: f64, eps: f64, delta: f64) -> Option<usize> {
    if !(0.0..1.0 / 3.0).contains(&delta) || !(eps > 0.0) {
        return None;
    }
    if b_squared <= 2.0 * eps {
        return Some(0);
    }
    if delta == 0.0 {
        return Some(1);
    }
    let rate = ((1.0 - delta) / (2.0 * delta)).ln();
    Some(((b_squared / (2.0 * eps)).ln() / rate).ceil() as usize)
}

/// Per-iteration contraction factor `2 delta / (1 - delta)` of the objective.
pub fn contraction_factor(delta: f64) -> f64 {
    2.0 * delta / (1.0 - delta)
}

/// Right-hand side of the one-step inequality
/// `psi(X^{t+1}) <= psi(X*) + delta / (1 - delta) ||A(X* - X^t)||^2`.
pub fn one_step_bound(psi_star: f64, delta: f64, residual_gap_sq: f64) -> f64 {
    psi_star + delta / (1.0 - delta) * residual_gap_sq
}

/// Constants of the noisy guarantee at isometry constant `delta < 1/3`:
/// `C = 2 (1 + delta) / (1 - 3 delta)` and
/// `D = 1 / C^2 + (2 delta / (1 - delta)) (1 + 1 / C)^2`.
pub fn noisy_constants(delta: f64) -> Option<(f64, f64)> {
    if !(0.0..1.0 / 3.0).contains(&delta) {
        return None;
    }
    let c = 2.0 * (1.0 + delta) / (1.0 - 3.0 * delta);
    let d = 1.0 / (c * c) + contraction_factor(delta) * (1.0 + 1.0 / c).powi(2);
    Some((c, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_arithmetic() {
        // delta = 0.2: rate log(2); ||b||^2 / 2 eps = 1024 -> 10 iterations
        assert_eq!(iteration_bound(2048.0, 1.0, 0.2), Some(10));
        assert_eq!(iteration_bound(1.0, 1.0, 0.2), Some(0));
        assert_eq!(iteration_bound(100.0, 1.0, 0.34), None);
    }

    #[test]
    fn noisy_constants_at_zero_delta() {
        let (c, d) = noisy_constants(0.0).unwrap();
        assert_eq!(c, 2.0);
        assert!((d - 0.25).abs() < 1e-15);
        assert!(noisy_constants(1.0 / 3.0).is_none());
    }
}
