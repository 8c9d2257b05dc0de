use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, LowRankFactorization};

/// Observed entries of an `rows x cols` matrix in coordinate form.
///
/// Entries are kept in row-major order with unique `(i, j)` pairs, so two sets
/// built from the same index set always enumerate their values identically.
#[derive(Clone, Debug, PartialEq)]
pub struct EntrySet {
    rows: usize,
    cols: usize,
    indices: Vec<(usize, usize)>,
    values: Vec<f64>,
}

impl EntrySet {
    /// Builds a set from arbitrary-order triples. Duplicates and out-of-range indices are errors.
    pub fn new(rows: usize, cols: usize, triples: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut triples = triples;
        triples.sort_unstable_by_key(|&(i, j, _)| (i, j));
        for w in triples.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate entry ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        let mut indices = Vec::with_capacity(triples.len());
        let mut values = Vec::with_capacity(triples.len());
        for (i, j, v) in triples {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("EntrySet::new"));
            }
            indices.push((i, j));
            values.push(v);
        }
        Ok(EntrySet {
            rows,
            cols,
            indices,
            values,
        })
    }

    /// Index set with all values zero. `indices` must already be sorted and unique.
    pub(crate) fn from_sorted_indices(rows: usize, cols: usize, indices: Vec<(usize, usize)>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let values = vec![0.0; indices.len()];
        EntrySet {
            rows,
            cols,
            indices,
            values,
        }
    }

    /// Every entry of `x`.
    pub fn from_dense(x: &DenseMatrix) -> Self {
        let (rows, cols) = x.shape();
        let indices = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).collect();
        EntrySet {
            rows,
            cols,
            indices,
            values: x.as_slice().to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `|Omega| / (rows * cols)`.
    pub fn density(&self) -> f64 {
        self.len() as f64 / (self.rows * self.cols) as f64
    }

    pub fn indices(&self) -> &[(usize, usize)] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.indices.iter().zip(&self.values).map(|(&(i, j), &v)| (i, j, v))
    }

    /// Same index set, new values (in canonical order).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} entries",
                values.len(),
                self.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("EntrySet::with_values"));
        }
        Ok(EntrySet {
            values,
            ..self.clone_indices()
        })
    }

    fn clone_indices(&self) -> Self {
        EntrySet {
            rows: self.rows,
            cols: self.cols,
            indices: self.indices.clone(),
            values: Vec::new(),
        }
    }

    /// Values of `x` at this index set.
    pub fn gather_dense(&self, x: &DenseMatrix) -> Vec<f64> {
        self.indices.iter().map(|&(i, j)| x[(i, j)]).collect()
    }

    /// Values of a low-rank matrix at this index set, in `O(|Omega| k)`.
    pub fn gather_lowrank(&self, x: &LowRankFactorization) -> Vec<f64> {
        self.indices.iter().map(|&(i, j)| x.entry(i, j)).collect()
    }

    /// Scatter to a dense matrix with zeros off the index set.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.iter() {
            out[(i, j)] = v;
        }
        out
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    /// Number of observations per row and per column.
    pub fn counts(&self) -> (Vec<usize>, Vec<usize>) {
        let mut rc = vec![0; self.rows];
        let mut cc = vec![0; self.cols];
        for &(i, j) in &self.indices {
            rc[i] += 1;
            cc[j] += 1;
        }
        (rc, cc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_and_validation() {
        let s = EntrySet::new(2, 3, vec![(1, 0, 3.0), (0, 2, 1.0), (0, 1, 2.0)]).unwrap();
        assert_eq!(s.indices(), &[(0, 1), (0, 2), (1, 0)]);
        assert_eq!(s.values(), &[2.0, 1.0, 3.0]);
        assert!(EntrySet::new(2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)]).is_err());
        assert!(EntrySet::new(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn scatter_gather_round_trip() {
        let x = DenseMatrix::from_fn(3, 4, |i, j| (i * 4 + j) as f64);
        let s = EntrySet::new(3, 4, vec![(0, 0, 0.0), (2, 3, 0.0), (1, 2, 0.0)]).unwrap();
        let s = s.with_values(s.gather_dense(&x)).unwrap();
        let d = s.to_dense();
        assert_eq!(d[(2, 3)], 11.0);
        assert_eq!(d[(1, 2)], 6.0);
        assert_eq!(d[(0, 1)], 0.0);
        assert_eq!(s.gather_dense(&d), s.values());
    }
}
