//! Incoherence, regularity and sampling-concentration diagnostics.

mod generator;
pub(crate) mod incoherence;
mod regularity;
mod rip;
pub mod theory;

pub use generator::{random_incoherent, MAX_REJECTION_ATTEMPTS};
pub use incoherence::{incoherence, IncoherenceReport};
pub use regularity::{concentration_bound, regularity};
pub use rip::{
    check_concentration, check_rip_incoherent, rip_density, ConcentrationLevel, ConcentrationReport, RipCheckReport,
    CONCENTRATION_LEVELS, MONTE_CARLO_SLACK,
};
