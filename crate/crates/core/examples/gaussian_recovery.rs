//! Noiseless recovery of a rank-k matrix from d = 6kn Gaussian measurements,
//! compared with the iteration count the convergence bound predicts.

use svp::analysis::theory::iteration_bound;
use svp::harness::fixtures::lowrank_truth;
use svp::operators::{estimate_isometry_constant, gaussian_ensemble, AffineMap};
use svp::rng;
use svp::solver::{svp_solve, SolverConfig, StepPolicy};

fn main() -> svp::Result<()> {
    let (n, k) = (40, 3);
    let truth = lowrank_truth(n, n, k, &mut rng::seeded(7));
    let map = gaussian_ensemble(n, n, 6 * k * n, 8)?;
    let b = map.apply_lowrank(&truth);
    let b_sq: f64 = b.iter().map(|v| v * v).sum();

    let tol = 1e-6 * b_sq;
    let cfg = SolverConfig::new(k, StepPolicy::ARMP).with_tolerance(tol);
    let (x, trace) = svp_solve(&map, &b, &cfg)?;
    println!(
        "{:?} after {} iterations, relative error {:.2e}",
        trace.status,
        trace.iterations(),
        x.distance(&truth) / truth.frobenius_norm()
    );

    // the trace records half the squared residual
    let delta = estimate_isometry_constant(&map, 2 * k, 200, 9);
    match iteration_bound(b_sq, tol / 2.0, delta) {
        Some(bound) => println!("estimated delta {delta:.3}, bound {bound} iterations"),
        None => println!("estimated delta {delta:.3} is too large for the bound"),
    }
    Ok(())
}
