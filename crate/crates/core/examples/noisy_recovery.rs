//! Completion with Gaussian and outlier noise. The noisy solver stops when the
//! objective plateaus instead of chasing a residual it cannot reach.

use svp::harness::fixtures::{completion_instance, rmse};
use svp::harness::NoiseModel;
use svp::solver::{svp_solve_noisy, SolverConfig, StepPolicy};

fn main() -> svp::Result<()> {
    let models = [
        NoiseModel::Gaussian { level: 0.05 },
        NoiseModel::Outlier { fraction: 0.1, magnitude: 3.0 },
    ];
    for model in models {
        let inst = completion_instance(300, 2, 0.2, 3.0, Some(&model), 3, 4)?;
        let cfg = SolverConfig::new(2, StepPolicy::COMPLETION).with_tolerance(1e-14);
        let (x, trace) = svp_solve_noisy(&inst.map, &inst.observed, &cfg)?;
        println!(
            "{model:?}: {:?} after {} iterations, RMSE {:.3e}, noise energy {:.3e}",
            trace.status,
            trace.iterations(),
            rmse(&x, &inst.truth),
            inst.noise_energy
        );
    }
    Ok(())
}
