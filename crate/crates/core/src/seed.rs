//! Counter-based seed derivation.
//!
//! Every stochastic step in a sweep draws its RNG seed from a master seed and a
//! tuple of counters, so any single cell can be replayed in isolation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `counters` into `master` one at a time.
pub fn derive(master: u64, counters: &[u64]) -> u64 {
    counters.iter().fold(mix64(master ^ GOLDEN), |acc, &c| {
        mix64(
            acc.wrapping_add(GOLDEN)
                .wrapping_add(mix64(c.wrapping_add(GOLDEN))),
        )
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
