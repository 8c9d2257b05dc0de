use super::completion::completion_step;
use super::{cell_seed, ExperimentOutcome};
use crate::error::{Error, Result};
use crate::harness::fixtures::{completion_instance, rmse};
use crate::harness::{params, ExperimentConfig, Metric, ResultRow};
use crate::solver::{svp_complete, PlateauRule, SolverConfig};

/// RMSE that counts as exact recovery.
pub const EXACT_RMSE: f64 = 1e-3;
/// Fraction of trials that must succeed at a density.
pub const SUCCESS_FRACTION: f64 = 0.9;
/// Upper end of the bisection bracket.
pub const UPPER_DENSITY: f64 = 0.9;
const BISECTION_STEPS: usize = 8;

/// Least-squares fit of `threshold_p = C k ln(n) / n` through the origin,
/// with the Spearman rank correlation between `n` and the threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdFit {
    pub c: f64,
    pub spearman: f64,
}

pub fn fit_threshold_constant(points: &[(usize, usize, f64)]) -> ThresholdFit {
    let (mut xy, mut xx) = (0.0, 0.0);
    for &(n, k, p) in points {
        let x = k as f64 * (n as f64).ln() / n as f64;
        xy += x * p;
        xx += x * x;
    }
    let ns: Vec<f64> = points.iter().map(|&(n, _, _)| n as f64).collect();
    let ps: Vec<f64> = points.iter().map(|&(_, _, p)| p).collect();
    ThresholdFit {
        c: xy / xx,
        spearman: spearman(&ns, &ps),
    }
}

/// Average ranks, ties sharing the mean rank.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let mean = (start + end - 1) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = mean;
        }
        start = end;
    }
    out
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let len = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / len, rb.iter().sum::<f64>() / len);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    if va == 0.0 || vb == 0.0 {
        0.0
    } else {
        cov / (va * vb).sqrt()
    }
}

/// Whether SVP recovers at density `p` in enough trials. Stops as soon as
/// the outcome is decided. Trials reuse the same truths and (nested) masks
/// at every density.
fn succeeds(cfg: &ExperimentConfig, n: usize, k: usize, p: f64) -> Result<bool> {
    let needed = (SUCCESS_FRACTION * cfg.trials as f64).ceil() as usize;
    let (mut ok, mut failed) = (0, 0);
    for trial in 0..cfg.trials {
        let truth_seed = cell_seed(cfg.seed, &[n as u64, k as u64, trial as u64]);
        let inst = completion_instance(n, k, p, cfg.mu, None, truth_seed, truth_seed ^ 1)?;
        let b_sq: f64 = inst.observed.iter().map(|v| v * v).sum();
        let solver = SolverConfig::new(k, completion_step(cfg))
            .with_tolerance(1e-12 * b_sq)
            .with_max_iterations(cfg.max_iterations)
            .with_plateau(PlateauRule::default())
            .with_seed(truth_seed);
        let good = match svp_complete(&inst.map, &inst.observed, &solver) {
            Ok((x, _)) => rmse(&x, &inst.truth) <= EXACT_RMSE,
            Err(Error::NonFinite(_)) => false,
            Err(e) => return Err(e),
        };
        if good {
            ok += 1;
        } else {
            failed += 1;
        }
        if ok >= needed {
            return Ok(true);
        }
        if failed > cfg.trials - needed {
            return Ok(false);
        }
    }
    Ok(ok >= needed)
}

/// Log-space bisection for the smallest density at which SVP recovers, for
/// every `(n, k)`, followed by a fit of `C` in `p ~ C k ln(n) / n`.
pub fn run_threshold_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let name = cfg.kind.name();
    let mut out = ExperimentOutcome::default();
    for &k in &cfg.ranks {
        let mut points = Vec::new();
        for &n in &cfg.sizes {
            if !succeeds(cfg, n, k, UPPER_DENSITY)? {
                return Err(Error::NotBracketed(UPPER_DENSITY));
            }
            // below k(2n - k) / n^2 there are fewer samples than degrees of freedom
            let mut lo = (0.5 * (k * (2 * n - k)) as f64 / (n * n) as f64).min(UPPER_DENSITY / 2.0);
            let mut hi = UPPER_DENSITY;
            for _ in 0..BISECTION_STEPS {
                let mid = (lo * hi).sqrt();
                if succeeds(cfg, n, k, mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            log::info!("{name}: n={n} k={k} threshold {hi:.4}");
            let cell = params(&[("n", n.to_string()), ("k", k.to_string())]);
            out.rows.push(ResultRow::new(name, cell, Metric::ThresholdP, hi, 0, cfg.seed));
            points.push((n, k, hi));
        }
        let fit = fit_threshold_constant(&points);
        out.rows.push(ResultRow::new(name, params(&[("k", k.to_string())]), Metric::FittedC, fit.c, 0, cfg.seed));
        if !(0.6..=2.6).contains(&fit.c) {
            out.failures.push(format!("{name} k={k}: fitted C {:.3} outside [0.6, 2.6]", fit.c));
        }
        if points.len() > 1 && fit.spearman >= 0.0 {
            out.failures.push(format!(
                "{name} k={k}: threshold does not decrease with n (Spearman {:.2})",
                fit.spearman
            ));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_planted_constant() {
        let points: Vec<_> = [100usize, 200, 400, 800]
            .iter()
            .map(|&n| (n, 2, 1.28 * 2.0 * (n as f64).ln() / n as f64))
            .collect();
        let fit = fit_threshold_constant(&points);
        assert!((fit.c - 1.28).abs() < 1e-12);
        assert_eq!(fit.spearman, -1.0);
    }

    #[test]
    fn spearman_handles_ties() {
        let r = spearman(&[1.0, 2.0, 3.0], &[0.5, 0.5, 0.5]);
        assert_eq!(r, 0.0);
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![1.5, 0.0, 1.5]);
    }
}
