//! Completing an incoherent low-rank matrix from a Bernoulli sample of its
//! entries, with the objective printed every few iterations.

use svp::harness::fixtures::{completion_instance, rmse};
use svp::solver::{svp_complete, SolverConfig, StepPolicy};

fn main() -> svp::Result<()> {
    let (n, k, p) = (300, 3, 0.15);
    let inst = completion_instance(n, k, p, 3.0, None, 1, 2)?;
    let b_sq: f64 = inst.observed.iter().map(|v| v * v).sum();
    let cfg = SolverConfig::new(k, StepPolicy::COMPLETION).with_tolerance(1e-10 * b_sq);

    let (x, trace) = svp_complete(&inst.map, &inst.observed, &cfg)?;
    for r in trace.records.iter().filter(|r| r.t % 25 == 0) {
        println!("t = {:>3}  objective {:.3e}", r.t, r.objective);
    }
    println!("{:?} in {} iterations, RMSE {:.2e}", trace.status, trace.iterations(), rmse(&x, &inst.truth));
    Ok(())
}
