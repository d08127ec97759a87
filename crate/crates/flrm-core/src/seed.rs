//! Deterministic seed derivation for nested randomness.
//!
//! Every source of randomness in the crate is a [`ChaCha8Rng`] whose seed is
//! derived from a master seed and a path of integer tags (scenario index,
//! repetition index, replicate index, ...). Replicates can therefore run on
//! any number of workers, in any order, and still reproduce bit-identical
//! results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche, cheap, stable across platforms.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a tag path.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    let mut state = splitmix64(master ^ 0x6a09_e667_f3bc_c908);
    for &tag in path {
        state = splitmix64(state ^ splitmix64(tag));
    }
    state
}

/// RNG for one derived stream.
pub fn stream_rng(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, path))
}
