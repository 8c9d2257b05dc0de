//! Comparison solvers: singular value thresholding and alternating least squares.

mod als;
mod svt;

pub use als::{als_solve, AlsConfig};
pub use svt::{shrink, svt_solve, svt_solve_lowrank, svt_solve_observed, SvtConfig};
