//! Seeded random streams.
//!
//! Every concept gets its own stream derived from `(seed, key)`, so output
//! does not depend on the order (or thread) in which concepts are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// FNV-1a over the key bytes.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

// splitmix64 finaliser
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(mix(seed))
}

/// Independent stream for `(seed, parts...)`.
pub fn derived(seed: u64, parts: &[&str]) -> Stream {
    let mut h = mix(seed);
    for part in parts {
        h = mix(h ^ stable_hash(part.as_bytes()));
        // separator so ("ab","c") and ("a","bc") differ
        h = mix(h ^ 0x1f);
    }
    ChaCha8Rng::seed_from_u64(h)
}
