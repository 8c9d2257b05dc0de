//! Low-rank matrix recovery by singular value projection.
//!
//! The crate is organized bottom-up:
//!
//! - [`matrix`]: dense, entry-set and low-rank representations, the dense
//!   reference SVD and a truncated SVD for structured operands.
//! - [`operators`]: linear measurement maps (Gaussian ensembles, entry
//!   sampling) and empirical isometry-constant estimation.
//! - [`solver`]: the projected-gradient iteration with rank-`k` SVD
//!   projection, its matrix-completion specialization, noisy stopping and
//!   rank selection.
//! - [`baselines`]: singular value thresholding and alternating least squares.
//! - [`analysis`]: incoherence, regularity and sampling-concentration checks.
//! - [`harness`]: reproducible experiments, ratings ingestion and result files.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod matrix;

pub use error::{Error, Result};
pub mod operators;
pub mod rng;
pub mod analysis;
pub mod solver;
pub mod baselines;
pub mod harness;
