//! Experiment driver: configurations, fixtures, runners and result files.

mod config;
pub mod experiments;
pub mod fixtures;
pub mod ratings;
mod results;

pub use config::{ExperimentConfig, ExperimentKind, NoiseModel, RatingsInput};
pub use experiments::{run_experiment, ExperimentOutcome};
pub use ratings::{ingest_ratings, read_predictions, write_predictions, RatingsDataset, RatingsFormat};
pub use results::{
    emit_results, manifest_path, params, read_manifest, read_results, same_results, Manifest, Metric, ResultRow,
    MANIFEST_SCHEMA,
};
