//! Seeded random streams.
//!
//! Every random decision in a run comes from a ChaCha8 stream derived from the
//! run seed plus a stream key, so results never depend on thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The root stream for a seed.
pub fn seeded(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream identified by `(seed, key)`.
pub fn stream(seed: u64, key: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

/// A child stream seeded from the parent's next output.
pub fn fork(parent: &mut StreamRng) -> StreamRng {
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}

/// Stable 64-bit FNV-1a hash, used to key streams by names.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
