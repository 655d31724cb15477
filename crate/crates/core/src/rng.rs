//! Deterministic random-stream derivation.
//!
//! Every stochastic piece of the crate draws from a stream derived from a
//! root seed plus a salt path (block index, trial index, ...). Streams depend
//! only on their salts, never on call order, so parallel simulations sample
//! identical values regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent ChaCha stream from `root` and a salt path.
pub fn derive_rng(root: u64, salts: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix64(root);
    for &salt in salts {
        state = splitmix64(state ^ splitmix64(salt));
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}

/// Derives a child root seed, for handing a namespaced seed to a component
/// that does its own stream derivation. The extra mixing constant keeps the
/// child's streams disjoint from streams derived directly under `root`.
pub fn derive_seed(root: u64, salts: &[u64]) -> u64 {
    let mut state = splitmix64(root);
    for &salt in salts {
        state = splitmix64(state ^ splitmix64(salt));
    }
    splitmix64(state ^ 0xc2b2_ae3d_27d4_eb4f)
}
