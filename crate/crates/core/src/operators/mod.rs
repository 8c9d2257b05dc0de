//! Linear measurement maps `A: R^{m x n} -> R^d` and their adjoints.

mod gaussian;
mod isometry;
mod sampling;

pub use gaussian::{gaussian_ensemble, GaussianEnsemble};
pub use isometry::{estimate_isometry_constant, random_unit_rank_k};
pub use sampling::{sample_entries, EntrySamplingMap, SamplingModel};

use crate::matrix::{DenseMatrix, LowRankFactorization};

/// A linear measurement operator with its adjoint.
///
/// Implementations satisfy `<apply(X), y> = <X, adjoint(y)>_F`.
pub trait AffineMap: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Number of measurements `d`.
    fn measurements(&self) -> usize;

    fn apply(&self, x: &DenseMatrix) -> Vec<f64>;
    fn adjoint(&self, y: &[f64]) -> DenseMatrix;

    fn apply_lowrank(&self, x: &LowRankFactorization) -> Vec<f64> {
        self.apply(&x.to_dense())
    }

    /// Entry-sampling maps expose themselves so solvers can take the sparse path.
    fn as_entry_sampling(&self) -> Option<&EntrySamplingMap> {
        None
    }
}
