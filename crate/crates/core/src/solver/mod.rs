//! Singular value projection for affine rank minimization and matrix completion.

mod config;
mod rank;
mod svp;
mod trace;

pub use config::{PlateauRule, SolverConfig, StepPolicy};
pub use rank::{select_rank_armp, select_rank_completion, DEFAULT_K_MAX, RANK_PLATEAU_REL, SPECTRAL_GAP_RATIO};
pub use svp::{svp_complete, svp_complete_entries, svp_solve, svp_solve_noisy, svp_solve_observed};
pub use trace::{IterationRecord, SolveStatus, SolveTrace};
