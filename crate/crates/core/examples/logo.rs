//! Reconstructs the rank-4 logo image from Gaussian measurements and prints
//! the result as text.

use svp::harness::fixtures::logo_truth;
use svp::operators::{gaussian_ensemble, AffineMap};
use svp::solver::{svp_solve, SolverConfig, StepPolicy};

fn main() -> svp::Result<()> {
    let truth = logo_truth()?;
    let (m, n) = (truth.rows(), truth.cols());
    let map = gaussian_ensemble(m, n, 6 * 4 * m.max(n), 1)?;
    let b = map.apply_lowrank(&truth);
    let b_sq: f64 = b.iter().map(|v| v * v).sum();
    let (x, trace) = svp_solve(&map, &b, &SolverConfig::new(4, StepPolicy::ARMP).with_tolerance(1e-8 * b_sq))?;
    println!(
        "{} iterations, relative error {:.2e}",
        trace.iterations(),
        x.distance(&truth) / truth.frobenius_norm()
    );
    for i in 0..m {
        let line: String = (0..n).map(|j| if x.entry(i, j) > 0.5 { '#' } else { '.' }).collect();
        println!("{line}");
    }
    Ok(())
}
