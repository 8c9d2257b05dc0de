use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, EntrySet, LowRankFactorization};

/// A matrix known only through products with blocks of vectors.
///
/// Blocks are stored as `DenseMatrix` with one vector per column.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;

    /// `Y * block`, with `block` of shape `ncols x b`.
    fn apply_block(&self, block: &DenseMatrix) -> DenseMatrix;

    /// `Y^T * block`, with `block` of shape `nrows x b`.
    fn apply_transpose_block(&self, block: &DenseMatrix) -> DenseMatrix;

    fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let b = DenseMatrix::from_fn(x.len(), 1, |i, _| x[i]);
        self.apply_block(&b).into_vec()
    }

    fn rmatvec(&self, y: &[f64]) -> Vec<f64> {
        let b = DenseMatrix::from_fn(y.len(), 1, |i, _| y[i]);
        self.apply_transpose_block(&b).into_vec()
    }

    /// Materializes the operator by applying it to the identity.
    fn materialize(&self) -> DenseMatrix {
        self.apply_block(&DenseMatrix::identity(self.ncols()))
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply_block(&self, block: &DenseMatrix) -> DenseMatrix {
        self.matmul(block)
    }

    fn apply_transpose_block(&self, block: &DenseMatrix) -> DenseMatrix {
        self.tr_matmul(block)
    }

    fn materialize(&self) -> DenseMatrix {
        self.clone()
    }
}

impl LinearOperator for LowRankFactorization {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply_block(&self, block: &DenseMatrix) -> DenseMatrix {
        let mut inner = self.v().tr_matmul(block);
        for (l, &s) in self.sigma().iter().enumerate() {
            inner.row_mut(l).iter_mut().for_each(|x| *x *= s);
        }
        self.u().matmul(&inner)
    }

    fn apply_transpose_block(&self, block: &DenseMatrix) -> DenseMatrix {
        let mut inner = self.u().tr_matmul(block);
        for (l, &s) in self.sigma().iter().enumerate() {
            inner.row_mut(l).iter_mut().for_each(|x| *x *= s);
        }
        self.v().matmul(&inner)
    }
}

impl LinearOperator for EntrySet {
    fn nrows(&self) -> usize {
        self.rows()
    }

    fn ncols(&self) -> usize {
        self.cols()
    }

    fn apply_block(&self, block: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows(), block.cols());
        for (i, j, v) in self.iter() {
            let src = block.row(j);
            for (o, s) in out.row_mut(i).iter_mut().zip(src) {
                *o += v * s;
            }
        }
        out
    }

    fn apply_transpose_block(&self, block: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols(), block.cols());
        for (i, j, v) in self.iter() {
            let src = block.row(i);
            for (o, s) in out.row_mut(j).iter_mut().zip(src) {
                *o += v * s;
            }
        }
        out
    }

    fn materialize(&self) -> DenseMatrix {
        self.to_dense()
    }
}

/// `a * L + b * S` with `L` low rank and `S` sparse, applied without ever
/// forming the dense sum. One matvec costs `O((m + n) k + |Omega|)`.
#[derive(Clone, Debug)]
pub struct StructuredOperand {
    rows: usize,
    cols: usize,
    lowrank: Option<(f64, LowRankFactorization)>,
    sparse: Option<(f64, EntrySet)>,
}

impl StructuredOperand {
    pub fn new(
        lowrank: Option<(f64, LowRankFactorization)>,
        sparse: Option<(f64, EntrySet)>,
    ) -> Result<Self> {
        let dims = match (&lowrank, &sparse) {
            (None, None) => {
                return Err(Error::InvalidArgument(
                    "structured operand needs a low-rank or sparse part".into(),
                ))
            }
            (Some((_, l)), None) => (l.rows(), l.cols()),
            (None, Some((_, s))) => (s.rows(), s.cols()),
            (Some((_, l)), Some((_, s))) => {
                if (l.rows(), l.cols()) != (s.rows(), s.cols()) {
                    return Err(Error::DimensionMismatch(format!(
                        "low-rank part is {}x{}, sparse part is {}x{}",
                        l.rows(),
                        l.cols(),
                        s.rows(),
                        s.cols()
                    )));
                }
                (l.rows(), l.cols())
            }
        };
        let scales_finite = lowrank.as_ref().is_none_or(|(a, _)| a.is_finite())
            && sparse.as_ref().is_none_or(|(b, _)| b.is_finite());
        if !scales_finite {
            return Err(Error::NonFinite("StructuredOperand scale"));
        }
        Ok(StructuredOperand {
            rows: dims.0,
            cols: dims.1,
            lowrank,
            sparse,
        })
    }

    pub fn lowrank(x: LowRankFactorization) -> Self {
        Self::new(Some((1.0, x)), None).expect("one part present")
    }

    pub fn sparse(s: EntrySet) -> Self {
        Self::new(None, Some((1.0, s))).expect("one part present")
    }

    /// Wraps a dense matrix as a fully populated sparse part.
    pub fn from_dense(x: &DenseMatrix) -> Self {
        Self::sparse(EntrySet::from_dense(x))
    }

    pub fn lowrank_part(&self) -> Option<&(f64, LowRankFactorization)> {
        self.lowrank.as_ref()
    }

    pub fn sparse_part(&self) -> Option<&(f64, EntrySet)> {
        self.sparse.as_ref()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        if let Some((a, l)) = &self.lowrank {
            out.add_scaled(*a, &l.to_dense());
        }
        if let Some((b, s)) = &self.sparse {
            for (i, j, v) in s.iter() {
                out[(i, j)] += b * v;
            }
        }
        out
    }
}

impl LinearOperator for StructuredOperand {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply_block(&self, block: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, block.cols());
        if let Some((a, l)) = &self.lowrank {
            out.add_scaled(*a, &l.apply_block(block));
        }
        if let Some((b, s)) = &self.sparse {
            out.add_scaled(*b, &s.apply_block(block));
        }
        out
    }

    fn apply_transpose_block(&self, block: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, block.cols());
        if let Some((a, l)) = &self.lowrank {
            out.add_scaled(*a, &l.apply_transpose_block(block));
        }
        if let Some((b, s)) = &self.sparse {
            out.add_scaled(*b, &s.apply_transpose_block(block));
        }
        out
    }

    fn materialize(&self) -> DenseMatrix {
        self.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn operand(rng: &mut ChaCha8Rng) -> StructuredOperand {
        let l = LowRankFactorization::from_factors(
            &DenseMatrix::random_gaussian(9, 2, rng),
            &DenseMatrix::random_gaussian(7, 2, rng),
        )
        .unwrap();
        let mut triples = Vec::new();
        for i in 0..9 {
            for j in 0..7 {
                if rng.random::<f64>() < 0.2 {
                    triples.push((i, j, rng.random::<f64>() - 0.5));
                }
            }
        }
        let s = EntrySet::new(9, 7, triples).unwrap();
        StructuredOperand::new(Some((0.7, l)), Some((-1.3, s))).unwrap()
    }

    #[test]
    fn matvec_matches_dense_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let op = operand(&mut rng);
        let dense = op.to_dense();
        let x: Vec<f64> = (0..7).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..9).map(|_| rng.random::<f64>()).collect();
        let fast = op.matvec(&x);
        let slow = dense.matvec(&x);
        let scale = slow.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = fast.iter().zip(&slow).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-10 * scale);
        let fast_t = op.rmatvec(&y);
        let slow_t = dense.rmatvec(&y);
        let err = fast_t.iter().zip(&slow_t).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn rejects_empty_and_mismatched() {
        assert!(StructuredOperand::new(None, None).is_err());
        let l = LowRankFactorization::zeros(3, 3, 1);
        let s = EntrySet::new(3, 4, vec![]).unwrap();
        assert!(StructuredOperand::new(Some((1.0, l)), Some((1.0, s))).is_err());
    }
}
