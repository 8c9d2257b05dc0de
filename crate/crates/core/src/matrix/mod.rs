//! Dense, sparse-entry and low-rank matrix representations and their SVDs.

mod dense;
mod entries;
pub(crate) mod factor;
mod lowrank;
mod operand;
mod svd;

pub use dense::{frobenius_norm, DenseMatrix};
pub use entries::EntrySet;
pub use factor::{jacobi_svd, orthonormalize, thin_qr};
pub use lowrank::LowRankFactorization;
pub use operand::{LinearOperator, StructuredOperand};
pub use svd::{full_svd, project_rank_k, truncated_svd, truncated_svd_with, SvdOptions, TruncatedSvd, ORACLE_LIMIT};
