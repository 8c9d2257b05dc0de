use crate::error::{Error, Result};
use crate::matrix::{LowRankFactorization, SvdOptions};

/// Step-size schedule `eta_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepPolicy {
    Constant(f64),
    /// `1 / (1 + delta)`, with `delta` a user guess of the rank-`2k` isometry constant.
    RipDefault { delta: f64 },
    /// `1 / ((1 + delta) p)` for entry sampling at density `p`.
    CompletionDefault { delta: f64 },
    /// `c / sqrt(t)` for `t = 1, 2, ...`.
    Decaying { c: f64 },
}

impl StepPolicy {
    pub const ARMP: StepPolicy = StepPolicy::RipDefault { delta: 1.0 / 3.0 };
    pub const COMPLETION: StepPolicy = StepPolicy::CompletionDefault { delta: 0.1 };

    /// `eta_t` for iteration `t >= 1`. `density` is required by the completion policy.
    pub fn step(&self, t: usize, density: Option<f64>) -> Result<f64> {
        Ok(match *self {
            StepPolicy::Constant(eta) => eta,
            StepPolicy::RipDefault { delta } => 1.0 / (1.0 + delta),
            StepPolicy::CompletionDefault { delta } => {
                let p = density.ok_or(Error::StepPolicyMisuse("completion-default"))?;
                1.0 / ((1.0 + delta) * p)
            }
            StepPolicy::Decaying { c } => c / (t.max(1) as f64).sqrt(),
        })
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            StepPolicy::Constant(eta) => eta.is_finite() && eta > 0.0,
            StepPolicy::RipDefault { delta } => (0.0..1.0).contains(&delta),
            StepPolicy::CompletionDefault { delta } => (0.0..1.0 / 3.0).contains(&delta),
            StepPolicy::Decaying { c } => c.is_finite() && c > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid step policy {self:?}")))
        }
    }
}

/// Stop when the objective fails to drop by `rel` (relative) over `window` iterations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlateauRule {
    pub window: usize,
    pub rel: f64,
}

impl Default for PlateauRule {
    fn default() -> Self {
        PlateauRule { window: 5, rel: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub rank: usize,
    pub step: StepPolicy,
    /// Target on `||A(X) - b||^2` (absolute, or excess over `noise_floor` when that is set).
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Known `||e||^2` of the measurement noise.
    pub noise_floor: Option<f64>,
    pub plateau: Option<PlateauRule>,
    /// Inner SVD settings; best effort by default, so a slow final digit never aborts a solve.
    pub svd: SvdOptions,
    /// Starting iterate instead of `X^0 = 0`.
    pub initial: Option<LowRankFactorization>,
    /// Record incoherence of each iterate in the trace.
    pub track_incoherence: bool,
}

impl SolverConfig {
    pub fn new(rank: usize, step: StepPolicy) -> Self {
        SolverConfig {
            rank,
            step,
            tolerance: 1e-10,
            max_iterations: 500,
            seed: 0,
            noise_floor: None,
            plateau: None,
            svd: SvdOptions {
                best_effort: true,
                ..SvdOptions::default()
            },
            initial: None,
            track_incoherence: false,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_noise_floor(mut self, noise_sq: f64) -> Self {
        self.noise_floor = Some(noise_sq);
        self
    }

    pub fn with_plateau(mut self, rule: PlateauRule) -> Self {
        self.plateau = Some(rule);
        self
    }

    pub fn with_incoherence(mut self) -> Self {
        self.track_incoherence = true;
        self
    }

    pub fn with_initial(mut self, x0: LowRankFactorization) -> Self {
        self.initial = Some(x0);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(nf) = self.noise_floor {
            if !(nf >= 0.0 && nf.is_finite()) {
                return Err(Error::InvalidArgument(format!("invalid noise floor {nf}")));
            }
        }
        if let Some(rule) = self.plateau {
            if rule.window == 0 || !(rule.rel >= 0.0) {
                return Err(Error::InvalidArgument(format!("invalid plateau rule {rule:?}")));
            }
        }
        self.step.validate()
    }

    /// Residual threshold on `||A(X) - b||^2`.
    pub(crate) fn stop_threshold(&self) -> f64 {
        self.noise_floor.unwrap_or(0.0) + self.tolerance
    }
}
