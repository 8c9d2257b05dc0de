//! Incoherence and regularity of random matrices, and the incoherence of SVP
//! iterates along a completion run.

use svp::analysis::{incoherence, random_incoherent, regularity};
use svp::harness::fixtures::completion_instance;
use svp::rng;
use svp::solver::{svp_complete, SolverConfig, StepPolicy};

fn main() -> svp::Result<()> {
    let x = random_incoherent(200, 150, 3, 3.0, &mut rng::seeded(1))?;
    let report = incoherence(&x, 200, 150)?;
    println!("drawn with mu <= 3: mu = {:.3}, mu_left = {:.3}", report.mu, report.mu_left);
    println!("regularity alpha = {:.3} (at most mu sqrt(k) = {:.3})", regularity(&x.to_dense())?, 3.0 * 3f64.sqrt());

    let inst = completion_instance(200, 2, 0.2, 3.0, None, 2, 3)?;
    let truth_mu = incoherence(&inst.truth, 200, 200)?.mu_left;
    let cfg = SolverConfig::new(2, StepPolicy::COMPLETION).with_tolerance(1e-12).with_incoherence();
    let (_, trace) = svp_complete(&inst.map, &inst.observed, &cfg)?;
    println!(
        "truth mu_left {truth_mu:.3}, largest iterate mu_left {:.3} over {} iterations",
        trace.max_mu_left().unwrap_or(f64::NAN),
        trace.iterations()
    );
    Ok(())
}
