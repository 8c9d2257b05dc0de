use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, EntrySet, LowRankFactorization};
use crate::operators::AffineMap;
use crate::rng;

/// How an index set was drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SamplingModel {
    /// Each entry independently with probability `p`.
    Bernoulli { p: f64 },
    /// Exactly `count` entries uniformly without replacement.
    FixedCount { count: usize },
    /// Supplied from outside (e.g. ingested ratings); density is `|Omega| / mn`.
    Given,
}

/// The entry-sampling projection `P_Omega`, viewed as a map to `R^{|Omega|}`.
///
/// `apply` lists `X_ij` for `(i, j)` in canonical row-major order; `adjoint`
/// scatters back with zeros elsewhere.
#[derive(Clone, Debug)]
pub struct EntrySamplingMap {
    omega: EntrySet,
    model: SamplingModel,
    seed: u64,
}

/// Samples an index set of an `m x n` matrix.
pub fn sample_entries(m: usize, n: usize, model: SamplingModel, seed: u64) -> Result<EntrySamplingMap> {
    let total = m * n;
    if total == 0 {
        return Err(Error::InvalidArgument(format!("empty ambient space {m}x{n}")));
    }
    let mut rng = rng::seeded(seed);
    let indices: Vec<(usize, usize)> = match model {
        SamplingModel::Bernoulli { p } => {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidProbability(p));
            }
            let mut out = Vec::with_capacity((p * total as f64 * 1.1) as usize + 8);
            for i in 0..m {
                for j in 0..n {
                    if p >= 1.0 || rng.random::<f64>() < p {
                        out.push((i, j));
                    }
                }
            }
            out
        }
        SamplingModel::FixedCount { count } => {
            if count == 0 || count > total {
                return Err(Error::InvalidArgument(format!(
                    "sample count {count} must be in 1..={total}"
                )));
            }
            let mut flat = rand::seq::index::sample(&mut rng, total, count).into_vec();
            flat.sort_unstable();
            flat.into_iter().map(|f| (f / n, f % n)).collect()
        }
        SamplingModel::Given => {
            return Err(Error::InvalidArgument(
                "a given index set cannot be sampled; use EntrySamplingMap::from_entries".into(),
            ))
        }
    };
    Ok(EntrySamplingMap {
        omega: EntrySet::from_sorted_indices(m, n, indices),
        model,
        seed,
    })
}

impl EntrySamplingMap {
    /// Uses the index set of `entries` (values are ignored).
    pub fn from_entries(entries: &EntrySet) -> Self {
        EntrySamplingMap {
            omega: EntrySet::from_sorted_indices(entries.rows(), entries.cols(), entries.indices().to_vec()),
            model: SamplingModel::Given,
            seed: 0,
        }
    }

    pub fn omega(&self) -> &EntrySet {
        &self.omega
    }

    pub fn model(&self) -> SamplingModel {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Sampling density `p`: the Bernoulli parameter when known, else `|Omega| / mn`.
    pub fn density(&self) -> f64 {
        match self.model {
            SamplingModel::Bernoulli { p } => p,
            _ => self.omega.density(),
        }
    }

    /// `P_Omega(x)` as an entry set carrying the observed values.
    pub fn observe(&self, x: &DenseMatrix) -> EntrySet {
        self.omega
            .with_values(self.omega.gather_dense(x))
            .expect("finite dense matrix")
    }

    pub fn observe_lowrank(&self, x: &LowRankFactorization) -> EntrySet {
        self.omega
            .with_values(self.omega.gather_lowrank(x))
            .expect("finite factors")
    }

    /// Entry set on `Omega` with the given values.
    pub fn entries_with(&self, values: &[f64]) -> Result<EntrySet> {
        self.omega.with_values(values.to_vec())
    }
}

impl AffineMap for EntrySamplingMap {
    fn rows(&self) -> usize {
        self.omega.rows()
    }

    fn cols(&self) -> usize {
        self.omega.cols()
    }

    fn measurements(&self) -> usize {
        self.omega.len()
    }

    fn apply(&self, x: &DenseMatrix) -> Vec<f64> {
        assert_eq!(x.shape(), (self.rows(), self.cols()), "operand shape mismatch");
        self.omega.gather_dense(x)
    }

    fn adjoint(&self, y: &[f64]) -> DenseMatrix {
        assert_eq!(y.len(), self.omega.len(), "adjoint input has wrong length");
        let mut out = DenseMatrix::zeros(self.rows(), self.cols());
        for (&(i, j), &v) in self.omega.indices().iter().zip(y) {
            out[(i, j)] = v;
        }
        out
    }

    fn apply_lowrank(&self, x: &LowRankFactorization) -> Vec<f64> {
        self.omega.gather_lowrank(x)
    }

    fn as_entry_sampling(&self) -> Option<&EntrySamplingMap> {
        Some(self)
    }
}
