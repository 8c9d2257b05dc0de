//! SVP against singular value thresholding and alternating least squares on
//! one completion instance.

use std::time::Instant;

use svp::baselines::{als_solve, svt_solve, AlsConfig, SvtConfig};
use svp::harness::fixtures::{completion_instance, rmse};
use svp::solver::{svp_complete, SolverConfig, StepPolicy};

fn main() -> svp::Result<()> {
    let (n, k, p) = (300, 2, 0.2);
    let inst = completion_instance(n, k, p, 3.0, None, 11, 12)?;
    let b_sq: f64 = inst.observed.iter().map(|v| v * v).sum();

    let start = Instant::now();
    let cfg = SolverConfig::new(k, StepPolicy::COMPLETION).with_tolerance(1e-8 * b_sq);
    let (x, trace) = svp_complete(&inst.map, &inst.observed, &cfg)?;
    report("SVP", rmse(&x, &inst.truth), trace.iterations(), start);

    let start = Instant::now();
    let cfg = SvtConfig {
        tolerance: 1e-4,
        ..SvtConfig::for_completion(n, n, p)
    };
    let (dense, trace) = svt_solve(&inst.map, &inst.observed, &cfg)?;
    let diff = dense.sub(&inst.truth.to_dense());
    report("SVT", diff.frobenius_norm() / n as f64, trace.iterations(), start);

    let start = Instant::now();
    let observed = inst.map.entries_with(&inst.observed)?;
    let (x, trace) = als_solve(&observed, &AlsConfig::new(k))?;
    report("ALS", rmse(&x, &inst.truth), trace.iterations(), start);
    Ok(())
}

fn report(name: &str, rmse: f64, iterations: usize, start: Instant) {
    println!("{name}: RMSE {rmse:.2e}, {iterations} iterations, {:.0} ms", start.elapsed().as_secs_f64() * 1e3);
}
