//! Keyed deterministic generators.
//!
//! Every randomized unit of work (a case, a hypothesis sentence, a
//! permutation test) derives its own generator from the run seed and a stable
//! key, so results do not depend on processing order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type UnitRng = ChaCha8Rng;

/// FNV-1a over the key bytes.
pub fn key_hash(key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn keyed_rng(seed: u64, key: &str) -> UnitRng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ mix(key_hash(key))))
}
