//! Deterministic seed derivation. All randomness flows from one master seed
//! through named paths, so any run is replayable and independent of worker
//! count or scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a master seed and a named path. The path string
/// is hashed bytewise (FNV-1a) and mixed; identical (master, path) pairs give
/// identical children on every platform.
pub fn derive(master: u64, path: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in path.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(master ^ splitmix64(h))
}

/// Derive through a path plus numeric indices (worker id, class-pair id, …).
pub fn derive_indexed(master: u64, path: &str, indices: &[u64]) -> u64 {
    let mut s = derive(master, path);
    for &i in indices {
        s = splitmix64(s ^ splitmix64(i.wrapping_add(0x632be59bd9b4e019)));
    }
    s
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_for(master: u64, path: &str) -> ChaCha8Rng {
    rng_from(derive(master, path))
}

pub fn rng_for_indexed(master: u64, path: &str, indices: &[u64]) -> ChaCha8Rng {
    rng_from(derive_indexed(master, path, indices))
}
