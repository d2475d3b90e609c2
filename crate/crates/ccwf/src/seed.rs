//! Deterministic seed derivation.
//!
//! Every randomized component receives a seed derived from the root seed, a
//! string salt naming the component, and an index. Results are therefore
//! reproducible regardless of evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// FNV-1a hash of the salt string.
fn hash_salt(salt: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in salt.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `(root, salt, idx)`.
pub fn derive(root: u64, salt: &str, idx: u64) -> u64 {
    mix(root
        .wrapping_add(mix(hash_salt(salt)))
        .wrapping_add(idx.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// The RNG used throughout the crate.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
