//! Derivation of per-purpose RNG streams from one global seed.
//!
//! Every source of randomness in the crate is a [`ChaCha8Rng`] seeded through
//! [`derive_seed`], so a run is reproducible from a single `u64` and any
//! component can be re-derived in isolation (a sample's mask placement does
//! not depend on batch iteration order, only on its own key).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; decorrelates consecutive keys.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `root` one at a time, mixing after each fold.
pub fn derive_seed(root: u64, parts: &[u64]) -> u64 {
    let mut state = mix(root);
    for &p in parts {
        state = mix(state ^ mix(p));
    }
    state
}

/// Deterministic generator for the stream identified by `(root, parts)`.
pub fn stream(root: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, parts))
}
