//! Deterministic random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type SvpRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SvpRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` of an experiment seeded with `seed`.
/// Results never depend on the order in which trials are scheduled.
pub fn trial_rng(seed: u64, trial: u64) -> SvpRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// A child seed for trial `trial`, for APIs that take a `u64` seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    use rand::Rng;
    trial_rng(seed, trial).random()
}
