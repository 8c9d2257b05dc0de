use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The experiments the harness can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ArmpTiming,
    LogoRecon,
    CompletionTiming,
    RankSweep,
    NoiseRobustness,
    ThresholdSweep,
    IncoherenceTrace,
    Ratings,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::ArmpTiming,
        ExperimentKind::LogoRecon,
        ExperimentKind::CompletionTiming,
        ExperimentKind::RankSweep,
        ExperimentKind::NoiseRobustness,
        ExperimentKind::ThresholdSweep,
        ExperimentKind::IncoherenceTrace,
        ExperimentKind::Ratings,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ArmpTiming => "armp-timing",
            ExperimentKind::LogoRecon => "logo-recon",
            ExperimentKind::CompletionTiming => "completion-timing",
            ExperimentKind::RankSweep => "rank-sweep",
            ExperimentKind::NoiseRobustness => "noise-robustness",
            ExperimentKind::ThresholdSweep => "threshold-sweep",
            ExperimentKind::IncoherenceTrace => "incoherence-trace",
            ExperimentKind::Ratings => "ratings",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind {s:?}")))
    }
}

/// Measurement noise added to clean observations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NoiseModel {
    /// I.i.d. Gaussian with standard deviation `level` times the RMS of the clean values.
    Gaussian { level: f64 },
    /// A `fraction` of the values shifted by `+-magnitude` times the clean RMS.
    Outlier { fraction: f64, magnitude: f64 },
}

impl NoiseModel {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseModel::Gaussian { level } => level >= 0.0 && level.is_finite(),
            NoiseModel::Outlier { fraction, magnitude } => {
                (0.0..=1.0).contains(&fraction) && magnitude >= 0.0 && magnitude.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid noise model {self:?}")))
        }
    }
}

/// Input ratings file for the `ratings` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatingsInput {
    pub path: PathBuf,
    /// Fraction of ratings assigned to the training split.
    #[serde(default = "default_split")]
    pub split: f64,
}

fn default_split() -> f64 {
    0.8
}

/// A fully specified experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Matrix sizes `n` (square `n x n`, except `ratings`: `[users, items]`).
    pub sizes: Vec<usize>,
    pub ranks: Vec<usize>,
    /// Sampling densities `p` for completion experiments.
    pub densities: Vec<f64>,
    pub noise: Option<NoiseModel>,
    pub trials: usize,
    pub seed: u64,
    /// CSV destination; the manifest goes next to it with a `.json` extension.
    pub output: PathBuf,
    /// Incoherence cap used when drawing ground-truth matrices.
    pub mu: f64,
    pub max_iterations: usize,
    /// Number of Gaussian measurements, overriding `6 k n`.
    pub measurements: Option<usize>,
    /// `delta` in the SVP step `1 / (1 + delta)` (Gaussian) or `1 / ((1 + delta) p)`
    /// (completion), overriding the solver default.
    pub step_delta: Option<f64>,
    pub ratings: Option<RatingsInput>,
}

/// On-disk form: every field but `kind` may be omitted and falls back to the
/// kind's defaults. Unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: Option<ExperimentKind>,
    sizes: Option<Vec<usize>>,
    ranks: Option<Vec<usize>>,
    densities: Option<Vec<f64>>,
    noise: Option<NoiseModel>,
    trials: Option<usize>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    mu: Option<f64>,
    max_iterations: Option<usize>,
    measurements: Option<usize>,
    step_delta: Option<f64>,
    ratings: Option<RatingsInput>,
}

impl ExperimentConfig {
    /// Desk-scale defaults for each experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            kind,
            sizes: vec![],
            ranks: vec![2],
            densities: vec![],
            noise: None,
            trials: 20,
            seed: 2009,
            output: PathBuf::from(format!("results/{}.csv", kind.name())),
            mu: 3.0,
            max_iterations: 500,
            measurements: None,
            step_delta: None,
            ratings: None,
        };
        match kind {
            ExperimentKind::ArmpTiming => ExperimentConfig {
                sizes: vec![20, 30, 40],
                ranks: vec![5],
                ..base
            },
            ExperimentKind::LogoRecon => ExperimentConfig {
                sizes: vec![38, 73],
                ranks: vec![4],
                trials: 1,
                ..base
            },
            ExperimentKind::CompletionTiming => ExperimentConfig {
                sizes: vec![400, 800],
                densities: vec![0.1],
                trials: 5,
                ..base
            },
            ExperimentKind::RankSweep => ExperimentConfig {
                sizes: vec![30, 200],
                densities: vec![0.3],
                trials: 5,
                ..base
            },
            ExperimentKind::NoiseRobustness => ExperimentConfig {
                sizes: vec![400],
                densities: vec![0.1],
                noise: Some(NoiseModel::Outlier {
                    fraction: 0.1,
                    magnitude: 3.0,
                }),
                trials: 10,
                ..base
            },
            ExperimentKind::ThresholdSweep => ExperimentConfig {
                sizes: vec![100, 200, 400, 800],
                trials: 10,
                // a shorter step keeps SVP stable right at the recovery boundary
                step_delta: Some(0.3),
                ..base
            },
            ExperimentKind::IncoherenceTrace => ExperimentConfig {
                sizes: vec![100, 200, 400],
                densities: vec![0.1, 0.2],
                step_delta: Some(0.3),
                ..base
            },
            ExperimentKind::Ratings => ExperimentConfig {
                sizes: vec![600, 800],
                ranks: vec![15],
                densities: vec![0.25],
                trials: 1,
                max_iterations: 100,
                ..base
            },
        }
    }

    /// Parses a JSON config. A `kind` in the file must agree with `expected` when both are given.
    pub fn from_json(text: &str, expected: Option<ExperimentKind>) -> Result<Self> {
        let file: ConfigFile = serde_json::from_str(text)?;
        let kind = match (file.kind, expected) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::Config(format!("config is for {a}, but {b} was requested")))
            }
            (Some(k), _) | (None, Some(k)) => k,
            (None, None) => return Err(Error::Config("config does not name an experiment kind".into())),
        };
        let d = ExperimentConfig::defaults(kind);
        let cfg = ExperimentConfig {
            kind,
            sizes: file.sizes.unwrap_or(d.sizes),
            ranks: file.ranks.unwrap_or(d.ranks),
            densities: file.densities.unwrap_or(d.densities),
            noise: file.noise.or(d.noise),
            trials: file.trials.unwrap_or(d.trials),
            seed: file.seed.unwrap_or(d.seed),
            output: file.output.unwrap_or(d.output),
            mu: file.mu.unwrap_or(d.mu),
            max_iterations: file.max_iterations.unwrap_or(d.max_iterations),
            measurements: file.measurements.or(d.measurements),
            step_delta: file.step_delta.or(d.step_delta),
            ratings: file.ratings.or(d.ratings),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, expected: Option<ExperimentKind>) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, expected)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return bad("ranks must be a nonempty list of positive integers".into());
        }
        if self.sizes.is_empty() || self.sizes.contains(&0) {
            return bad("sizes must be a nonempty list of positive integers".into());
        }
        let needs_densities = matches!(
            self.kind,
            ExperimentKind::CompletionTiming
                | ExperimentKind::NoiseRobustness
                | ExperimentKind::IncoherenceTrace
                | ExperimentKind::Ratings
        );
        if needs_densities && self.densities.is_empty() {
            return bad(format!("{} needs at least one density", self.kind));
        }
        if let Some(p) = self.densities.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return bad(format!("density {p} outside (0, 1]"));
        }
        match self.kind {
            ExperimentKind::LogoRecon if self.sizes.len() != 2 => return bad("logo-recon sizes are [rows, cols]".into()),
            ExperimentKind::Ratings if self.sizes.len() != 2 => return bad("ratings sizes are [users, items]".into()),
            ExperimentKind::ThresholdSweep if self.sizes.len() < 4 => {
                return bad("threshold-sweep needs at least four sizes to fit a scaling law".into())
            }
            ExperimentKind::NoiseRobustness if self.noise.is_none() => {
                return bad("noise-robustness needs a noise model".into())
            }
            _ => {}
        }
        if let Some(noise) = &self.noise {
            noise.validate()?;
        }
        if let Some(r) = &self.ratings {
            if !(r.split > 0.0 && r.split < 1.0) {
                return bad(format!("ratings split {} outside (0, 1)", r.split));
            }
        }
        if let Some(delta) = self.step_delta {
            if !(0.0..1.0).contains(&delta) {
                return bad(format!("step delta {delta} outside [0, 1)"));
            }
        }
        if !(self.mu > 0.0) || self.max_iterations == 0 {
            return bad("mu and max_iterations must be positive".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
