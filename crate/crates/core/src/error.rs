use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix {rows}x{cols} exceeds the dense oracle limit of {limit}")]
    DimensionOverflow { rows: usize, cols: usize, limit: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid probability {0}: expected 0 < p <= 1")]
    InvalidProbability(f64),

    #[error("truncated SVD did not converge after {iterations} iterations (residual {residual:.3e}, tol {tol:.1e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("factors are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("matrix is zero")]
    ZeroMatrix,

    #[error("step policy {0} requires an entry-sampling operator")]
    StepPolicyMisuse(&'static str),

    #[error("no rank plateau found up to k = {0}")]
    BudgetExhausted(usize),

    #[error("no significant spectral gap (best ratio {best_ratio:.3} at k = {best_k})")]
    NoSpectralGap { best_k: usize, best_ratio: f64 },

    #[error("singular least-squares system: {0}")]
    SingularSystem(String),

    #[error("SVT diverged at iteration {iteration}: objective {objective:.3e} exceeds 10x the initial {initial:.3e}")]
    Divergence {
        iteration: usize,
        objective: f64,
        initial: f64,
    },

    #[error("could not sample a {mu}-incoherent matrix after {attempts} attempts")]
    RejectionSampling { mu: f64, attempts: usize },

    #[error("no measurements")]
    NoMeasurements,

    #[error("bisection not bracketed: no success at p = {0}")]
    NotBracketed(f64),

    #[error("gaussian ensemble needs {needed} stored entries, budget is {budget}; reduce n or d")]
    MemoryBudget { needed: usize, budget: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
