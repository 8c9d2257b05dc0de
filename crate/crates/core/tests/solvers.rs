use rand::Rng;
use rand_distr::{Distribution, Normal};

use svp::baselines::{als_solve, shrink, svt_solve, AlsConfig, SvtConfig};
use svp::harness::fixtures::{completion_instance, lowrank_truth};
use svp::matrix::{DenseMatrix, EntrySet, LowRankFactorization};
use svp::operators::{gaussian_ensemble, sample_entries, AffineMap, EntrySamplingMap, SamplingModel};
use svp::solver::{
    select_rank_armp, select_rank_completion, svp_complete, svp_complete_entries, svp_solve, svp_solve_noisy,
    SolveStatus, SolverConfig, StepPolicy, DEFAULT_K_MAX,
};
use svp::{rng, Error};

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn residual_sq<A: AffineMap>(map: &A, x: &LowRankFactorization, b: &[f64]) -> f64 {
    map.apply_lowrank(x).iter().zip(b).map(|(a, y)| (a - y).powi(2)).sum()
}

fn dense_rmse(x: &DenseMatrix, truth: &LowRankFactorization) -> f64 {
    let diff = x.sub(&truth.to_dense());
    diff.frobenius_norm() / ((diff.rows() * diff.cols()) as f64).sqrt()
}

/// `b = A(X*) + e` with `||e|| = level ||A(X*)||`.
fn noisy_gaussian(n: usize, k: usize, d: usize, level: f64, seed: u64) -> (svp::operators::GaussianEnsemble, Vec<f64>, f64) {
    let mut g = rng::seeded(seed);
    let truth = lowrank_truth(n, n, k, &mut g);
    let map = gaussian_ensemble(n, n, d, g.random()).unwrap();
    let clean = map.apply_lowrank(&truth);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let raw: Vec<f64> = (0..d).map(|_| normal.sample(&mut g)).collect();
    let scale = level * sq_norm(&clean).sqrt() / sq_norm(&raw).sqrt();
    let b = clean.iter().zip(&raw).map(|(c, e)| c + scale * e).collect();
    (map, b, scale * scale * sq_norm(&raw))
}

#[test]
fn noisy_recovery_reaches_noise_floor() {
    for seed in 0..5 {
        let (map, b, e_sq) = noisy_gaussian(40, 2, 480, 0.05, seed);
        let cfg = SolverConfig::new(2, StepPolicy::ARMP).with_tolerance(1e-14).with_seed(seed);
        let (x, trace) = svp_solve_noisy(&map, &b, &cfg).unwrap();
        assert!(residual_sq(&map, &x, &b) <= 4.0 * e_sq);
        assert_eq!(trace.status, SolveStatus::Stalled);
        assert!(trace.iterations() <= cfg.max_iterations);
        assert!(trace.objectives().iter().all(|&o| o >= 0.0));
    }
}

#[test]
fn armp_rank_selection_finds_true_rank() {
    for seed in 0..3 {
        let (map, b, _) = noisy_gaussian(30, 2, 6 * 3 * 30, 0.0, 100 + seed);
        let cfg = SolverConfig::new(1, StepPolicy::ARMP).with_tolerance(1e-10 * sq_norm(&b)).with_seed(seed);
        assert_eq!(select_rank_armp(&map, &b, 1, 1, DEFAULT_K_MAX, &cfg).unwrap(), 2);
    }
}

#[test]
fn armp_rank_selection_on_zero_and_noisy_data() {
    let map = gaussian_ensemble(20, 20, 200, 3).unwrap();
    let cfg = SolverConfig::new(1, StepPolicy::ARMP);
    assert_eq!(select_rank_armp(&map, &vec![0.0; 200], 3, 2, 10, &cfg).unwrap(), 3);

    let (map, b, e_sq) = noisy_gaussian(30, 2, 6 * 3 * 30, 0.05, 7);
    let cfg = SolverConfig::new(1, StepPolicy::ARMP).with_tolerance(1e-14).with_seed(7);
    let k = select_rank_armp(&map, &b, 1, 1, DEFAULT_K_MAX, &cfg).unwrap();
    let (_, trace) = svp_solve_noisy(&map, &b, &SolverConfig { rank: k, ..cfg }).unwrap();
    assert!(trace.final_objective() <= 2.0 * e_sq, "k = {k}");
}

#[test]
fn armp_rank_selection_gives_up_at_ceiling() {
    let (map, b, _) = noisy_gaussian(12, 5, 400, 0.0, 71);
    let cfg = SolverConfig::new(1, StepPolicy::ARMP).with_tolerance(1e-10 * sq_norm(&b));
    assert!(matches!(select_rank_armp(&map, &b, 1, 1, 2, &cfg), Err(Error::BudgetExhausted(_))));
    assert!(select_rank_armp(&map, &b, 0, 1, 2, &cfg).is_err());
}

#[test]
fn completion_rank_selection() {
    let inst = completion_instance(200, 2, 0.3, 3.0, None, 11, 12).unwrap();
    let observed = inst.map.entries_with(&inst.observed).unwrap();
    assert_eq!(select_rank_completion(&observed, DEFAULT_K_MAX).unwrap(), 2);

    let rank_one = DenseMatrix::from_fn(30, 20, |i, j| (i as f64 + 1.0) * (j as f64 - 9.5));
    assert_eq!(select_rank_completion(&EntrySet::from_dense(&rank_one), DEFAULT_K_MAX).unwrap(), 1);

    let noise = DenseMatrix::random_gaussian(80, 80, &mut rng::seeded(13));
    assert!(matches!(
        select_rank_completion(&EntrySet::from_dense(&noise), DEFAULT_K_MAX),
        Err(Error::NoSpectralGap { .. })
    ));
}

#[test]
fn full_observation_completes_in_one_step() {
    let truth = lowrank_truth(25, 18, 3, &mut rng::seeded(21));
    let map = sample_entries(25, 18, SamplingModel::Bernoulli { p: 1.0 }, 0).unwrap();
    let b = map.apply_lowrank(&truth);
    let cfg = SolverConfig::new(3, StepPolicy::CompletionDefault { delta: 0.0 }).with_tolerance(1e-20);
    let (x, trace) = svp_complete(&map, &b, &cfg).unwrap();
    assert_eq!(trace.iterations(), 1);
    assert!(x.distance(&truth) <= 1e-10 * truth.frobenius_norm());
}

#[test]
fn completion_from_entry_set_matches_map_route_and_recovers() {
    let inst = completion_instance(60, 2, 0.5, 3.0, None, 31, 32).unwrap();
    let observed = inst.map.entries_with(&inst.observed).unwrap();
    let cfg = SolverConfig::new(2, StepPolicy::COMPLETION).with_tolerance(1e-12).with_seed(4);
    let map = EntrySamplingMap::from_entries(&observed);
    let (a, ta) = svp_complete(&map, observed.values(), &cfg).unwrap();
    let (b, tb) = svp_complete_entries(&observed, &cfg).unwrap();
    assert!(ta.same_numerics(&tb));
    assert!(a.distance(&b) <= 1e-12);
    assert!(dense_rmse(&b.to_dense(), &inst.truth) <= 1e-4);
    assert!(matches!(
        svp_complete_entries(&EntrySet::new(4, 4, vec![]).unwrap(), &cfg),
        Err(Error::NoMeasurements)
    ));
}

#[test]
fn svt_completes_moderate_instance() {
    let inst = completion_instance(100, 2, 0.3, 3.0, None, 41, 42).unwrap();
    let cfg = SvtConfig {
        tau: 5.0 * 100.0,
        ..SvtConfig::for_completion(100, 100, 0.3)
    };
    let (x, trace) = svt_solve(&inst.map, &inst.observed, &cfg).unwrap();
    assert!(trace.iterations() <= 500);
    assert!(dense_rmse(&x, &inst.truth) <= 1e-2);
}

#[test]
fn svt_zero_measurements_give_zero() {
    let map = gaussian_ensemble(6, 5, 10, 1).unwrap();
    let (x, _) = svt_solve(&map, &[0.0; 10], &SvtConfig::for_completion(6, 5, 1.0)).unwrap();
    assert_eq!(x.frobenius_norm(), 0.0);
}

#[test]
fn shrink_soft_thresholds_spectrum() {
    let y = DenseMatrix::from_fn(3, 3, |i, j| if i == j { [5.0, 3.0, 1.0][i] } else { 0.0 });
    let x = shrink(&y, 2.0).unwrap().to_dense();
    let want = DenseMatrix::from_fn(3, 3, |i, j| if i == j { [3.0, 1.0, 0.0][i] } else { 0.0 });
    assert!(x.sub(&want).frobenius_norm() < 1e-10);
}

#[test]
fn als_fits_full_observation_and_tracks_svp() {
    let truth = lowrank_truth(30, 20, 3, &mut rng::seeded(51));
    let full = EntrySet::from_dense(&truth.to_dense());
    let (x, trace) = als_solve(&full, &AlsConfig::new(3).with_lambda(0.0).with_sweeps(25).with_seed(1)).unwrap();
    assert!(trace.iterations() <= 50);
    assert!(dense_rmse(&x.to_dense(), &truth) <= 1e-6);

    let inst = completion_instance(200, 2, 0.3, 3.0, None, 52, 53).unwrap();
    let observed = inst.map.entries_with(&inst.observed).unwrap();
    let (als, _) = als_solve(&observed, &AlsConfig::new(2).with_seed(2)).unwrap();
    let cfg = SolverConfig::new(2, StepPolicy::COMPLETION).with_tolerance(1e-8 * sq_norm(&inst.observed));
    let (svp, _) = svp_complete(&inst.map, &inst.observed, &cfg).unwrap();
    let (als_err, svp_err) = (dense_rmse(&als.to_dense(), &inst.truth), dense_rmse(&svp.to_dense(), &inst.truth));
    // ALS with a ridge is biased; it only has to land in the same regime
    assert!(als_err <= 2.0 * svp_err.max(1e-2), "ALS {als_err:.3e}, SVP {svp_err:.3e}");
}

#[test]
fn plain_and_noisy_agree_without_noise() {
    let (map, b, _) = noisy_gaussian(20, 2, 240, 0.0, 61);
    let cfg = SolverConfig::new(2, StepPolicy::ARMP).with_tolerance(1e-8 * sq_norm(&b)).with_seed(3);
    let (x, t) = svp_solve(&map, &b, &cfg).unwrap();
    let (y, u) = svp_solve_noisy(&map, &b, &cfg).unwrap();
    assert!(t.same_numerics(&u));
    assert_eq!(x, y);
}
