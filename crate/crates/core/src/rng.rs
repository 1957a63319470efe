//! Deterministic random streams.
//!
//! Every trial draws from its own ChaCha8 stream selected by
//! `(master_seed, trial_index)`, so results do not depend on which worker ran
//! which trial. Within a trial the draw order is fixed: the true phase first,
//! then one uniform per click in protocol order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

const BOOTSTRAP_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Independent stream for one trial.
pub fn trial_stream(master_seed: u64, trial_index: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_index);
    rng
}

/// Stream reserved for bootstrap resampling, disjoint from all trial streams.
pub fn bootstrap_stream(master_seed: u64) -> TrialRng {
    ChaCha8Rng::seed_from_u64(master_seed ^ BOOTSTRAP_SALT)
}
