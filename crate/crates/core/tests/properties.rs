use proptest::prelude::*;
use rand::Rng;

use svp::analysis::{check_concentration, incoherence, random_incoherent, regularity};
use svp::baselines::{als_solve, shrink, AlsConfig};
use svp::matrix::{project_rank_k, DenseMatrix, EntrySet, LowRankFactorization};
use svp::operators::{gaussian_ensemble, sample_entries, AffineMap, SamplingModel};
use svp::rng;
use svp::solver::{svp_solve_observed, SolverConfig, StepPolicy};

fn gaussian(m: usize, n: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::random_gaussian(m, n, &mut rng::seeded(seed))
}

fn inner(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x * y).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn nalgebra_sigma(x: &DenseMatrix) -> Vec<f64> {
    let na = nalgebra::DMatrix::from_row_slice(x.rows(), x.cols(), x.as_slice());
    let mut s: Vec<f64> = na.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn dims() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (2usize..24, 2usize..24, any::<u64>()).prop_flat_map(|(m, n, seed)| (Just(m), Just(n), 1..=m.min(n).min(4), Just(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_best_rank_k((m, n, k, seed) in dims()) {
        let x = gaussian(m, n, seed);
        let p = project_rank_k(&x, k).unwrap();
        let sigma = nalgebra_sigma(&x);
        let tail = sigma[k..].iter().map(|s| s * s).sum::<f64>().sqrt();
        prop_assert!((x.sub(&p.to_dense()).frobenius_norm() - tail).abs() <= 1e-9 * (1.0 + tail));
        prop_assert!(p.k() == k);
        prop_assert!(p.orthonormality_error() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent((m, n, k, seed) in dims()) {
        let once = project_rank_k(&gaussian(m, n, seed), k).unwrap();
        let twice = project_rank_k(&once.to_dense(), k).unwrap();
        prop_assert!(once.distance(&twice) <= 1e-9 * (1.0 + once.frobenius_norm()));
    }

    #[test]
    fn gaussian_adjoint_identity((m, n, _k, seed) in dims(), d in 1usize..40) {
        let map = gaussian_ensemble(m, n, d, seed).unwrap();
        let x = gaussian(m, n, seed ^ 1);
        let y: Vec<f64> = (0..d).map(|i| (i as f64 * 0.37).sin()).collect();
        let lhs = dot(&map.apply(&x), &y);
        let rhs = inner(&x, &map.adjoint(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn sampling_adjoint_identity((m, n, _k, seed) in dims(), p in 0.05f64..1.0) {
        let map = sample_entries(m, n, SamplingModel::Bernoulli { p }, seed).unwrap();
        let x = gaussian(m, n, seed ^ 2);
        let y: Vec<f64> = (0..map.measurements()).map(|i| (i as f64).cos()).collect();
        let lhs = dot(&map.apply(&x), &y);
        let rhs = inner(&x, &map.adjoint(&y));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn measurement_maps_are_linear((m, n, _k, seed) in dims(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let map = gaussian_ensemble(m, n, 12, seed).unwrap();
        let (x, y) = (gaussian(m, n, seed ^ 3), gaussian(m, n, seed ^ 4));
        let mut combo = x.scaled(a);
        combo.add_scaled(b, &y);
        let direct = map.apply(&combo);
        let (ax, ay) = (map.apply(&x), map.apply(&y));
        for i in 0..direct.len() {
            prop_assert!((direct[i] - (a * ax[i] + b * ay[i])).abs() <= 1e-9 * (1.0 + direct[i].abs()));
        }
    }

    #[test]
    fn lowrank_apply_matches_dense((m, n, k, seed) in dims()) {
        let map = gaussian_ensemble(m, n, 10, seed).unwrap();
        let x = project_rank_k(&gaussian(m, n, seed ^ 5), k).unwrap();
        let fast = map.apply_lowrank(&x);
        let slow = map.apply(&x.to_dense());
        for (f, s) in fast.iter().zip(&slow) {
            prop_assert!((f - s).abs() <= 1e-9 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn incoherent_implies_regular(m in 10usize..50, n in 10usize..50, k in 1usize..4, mu in 3.0f64..6.0, seed in any::<u64>()) {
        let mut g = rng::seeded(seed);
        let base = random_incoherent(m, n, k, mu, &mut g).unwrap();
        let mut sigma: Vec<f64> = (0..k).map(|_| g.random_range(0.01..100.0)).collect();
        sigma.sort_by(|a, b| b.total_cmp(a));
        let x = LowRankFactorization::new(base.u().clone(), sigma, base.v().clone()).unwrap();
        let alpha = regularity(&x.to_dense()).unwrap();
        prop_assert!(alpha <= mu * (k as f64).sqrt() + 1e-9);
    }

    #[test]
    fn incoherence_ignores_scale((m, n, k, seed) in dims(), c in 1e-3f64..1e3) {
        let x = project_rank_k(&gaussian(m, n, seed), k).unwrap();
        let a = incoherence(&x, m, n).unwrap();
        let b = incoherence(&x.scaled(c), m, n).unwrap();
        prop_assert!((a.mu - b.mu).abs() <= 1e-12 * a.mu);
        prop_assert!((a.mu_left - b.mu_left).abs() <= 1e-12 * a.mu_left);
    }

    #[test]
    fn shrink_is_nonexpansive((m, n, _k, seed) in dims(), tau in 0.0f64..4.0) {
        let (a, b) = (gaussian(m, n, seed), gaussian(m, n, seed ^ 6));
        let (sa, sb) = (shrink(&a, tau).unwrap(), shrink(&b, tau).unwrap());
        let lhs = sa.to_dense().sub(&sb.to_dense()).frobenius_norm();
        prop_assert!(lhs <= a.sub(&b).frobenius_norm() + 1e-9);
    }

    #[test]
    fn svp_iterates_keep_rank(seed in any::<u64>(), k in 1usize..4) {
        let map = gaussian_ensemble(12, 10, 80, seed).unwrap();
        let b: Vec<f64> = (0..80).map(|i| (i as f64 * 1.3).sin()).collect();
        let cfg = SolverConfig::new(k, StepPolicy::ARMP).with_max_iterations(8);
        let mut ranks = Vec::new();
        let (x, _) = svp_solve_observed(&map, &b, &cfg, |_, x| ranks.push(x.k())).unwrap();
        prop_assert!(x.k() == k);
        prop_assert!(ranks.iter().all(|&r| r == k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn als_objective_never_increases(seed in any::<u64>(), lambda in 0.01f64..1.0) {
        let mut g = rng::seeded(seed);
        let truth = project_rank_k(&DenseMatrix::random_gaussian(30, 25, &mut g), 3).unwrap();
        let map = sample_entries(30, 25, SamplingModel::Bernoulli { p: 0.5 }, seed).unwrap();
        let observed: EntrySet = map.observe_lowrank(&truth);
        let (_, trace) = als_solve(&observed, &AlsConfig::new(3).with_lambda(lambda).with_sweeps(20).with_seed(seed)).unwrap();
        let obj = trace.objectives();
        for w in obj.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-10) + 1e-12, "{} then {}", w[0], w[1]);
        }
    }

    #[test]
    fn sampled_energy_is_unbiased(seed in any::<u64>(), p in 0.1f64..0.9) {
        let x = gaussian(20, 20, seed);
        let report = check_concentration(&x, p, 400, seed).unwrap();
        prop_assert!(report.unbiased_within(5.0), "mean {} expected {} se {}", report.mean, report.expected, report.std_error);
    }
}
