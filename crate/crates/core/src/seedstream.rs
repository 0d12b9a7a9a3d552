//! Deterministic random substreams.
//!
//! Every randomized experiment takes a single `u64` master seed. Trial `t`
//! draws from ChaCha12 stream `t + 1` of that seed, and stream `0` is
//! reserved for one-off setup draws (sampling witness positions, random
//! operators, and the like). Because streams are independent by construction,
//! raising `--trials` later extends a run without perturbing earlier trials.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream reserved for setup draws; trials start at stream 1.
const SETUP_STREAM: u64 = 0;

/// RNG for per-run setup (instance generation, subspace choice, ...).
pub fn setup_rng(master_seed: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(SETUP_STREAM);
    rng
}

/// Independent RNG for Monte-Carlo trial `trial` (0-based).
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(master_seed);
    rng.set_stream(trial + 1);
    rng
}

/// Derive an independent sub-master seed for configuration `salt` of a
/// multi-configuration run (splitmix64 round). Keeps per-config streams
/// stable when other configurations are added or removed.
pub fn mix_seed(master_seed: u64, salt: u64) -> u64 {
    let mut z = master_seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
