//! One runner per experiment kind. Each returns its result rows plus a list
//! of failed in-run assertions; an empty list means the run passed.

mod armp;
mod completion;
mod incoherence;
mod noise;
mod rank;
mod ratings;
mod threshold;

pub use armp::{run_armp_timing, run_logo_reconstruction, MEMORY_BUDGET};
pub use completion::run_completion_timing;
pub use incoherence::{run_incoherence_trace, INCOHERENCE_CAP};
pub use noise::{compare_methods, run_noise_robustness, MethodErrors};
pub use rank::run_rank_sweep;
pub use ratings::{run_ratings, surrogate_ratings};
pub use threshold::{fit_threshold_constant, run_threshold_sweep, ThresholdFit};

use std::time::Instant;

use crate::error::Result;
use crate::harness::{ExperimentConfig, ExperimentKind, ResultRow};
use crate::rng;

#[derive(Clone, Debug, Default)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<String>,
}

impl ExperimentOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn extend(&mut self, other: ExperimentOutcome) {
        self.rows.extend(other.rows);
        self.failures.extend(other.failures);
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::ArmpTiming => run_armp_timing(cfg),
        ExperimentKind::LogoRecon => run_logo_reconstruction(cfg),
        ExperimentKind::CompletionTiming => run_completion_timing(cfg),
        ExperimentKind::RankSweep => run_rank_sweep(cfg),
        ExperimentKind::NoiseRobustness => run_noise_robustness(cfg),
        ExperimentKind::ThresholdSweep => run_threshold_sweep(cfg),
        ExperimentKind::IncoherenceTrace => run_incoherence_trace(cfg),
        ExperimentKind::Ratings => run_ratings(cfg),
    }
}

/// Seed for one cell of a grid, derived from the experiment seed.
pub(crate) fn cell_seed(base: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(base, |s, &p| rng::trial_seed(s, p))
}

pub(crate) fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}
