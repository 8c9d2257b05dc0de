//! Best rank-k approximation of a dense matrix and of a structured
//! low-rank-plus-sparse operand, without forming the sum.

use svp::matrix::{project_rank_k, truncated_svd, DenseMatrix, EntrySet, LowRankFactorization, StructuredOperand};
use svp::rng;

fn main() -> svp::Result<()> {
    let mut g = rng::seeded(1);
    let x = DenseMatrix::random_gaussian(60, 40, &mut g);
    for k in [1, 5, 20] {
        let p = project_rank_k(&x, k)?;
        let err = x.sub(&p.to_dense()).frobenius_norm() / x.frobenius_norm();
        println!("rank {k:>2}: relative error {err:.4}, top sigma {:.3}", p.sigma()[0]);
    }

    let lowrank = LowRankFactorization::from_factors(
        &DenseMatrix::random_gaussian(60, 3, &mut g),
        &DenseMatrix::random_gaussian(40, 3, &mut g),
    )?;
    let spikes = EntrySet::new(60, 40, vec![(0, 0, 5.0), (10, 7, -3.0), (59, 39, 2.0)])?;
    let operand = StructuredOperand::new(Some((1.0, lowrank)), Some((0.5, spikes)))?;
    let svd = truncated_svd(&operand, 3, 1e-10, 500)?;
    println!("structured operand: top three sigma {:?}", svd.sigma());
    Ok(())
}
