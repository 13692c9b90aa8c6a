//! Keyed random streams.
//!
//! Every random quantity in a panel is drawn from a stream identified by
//! `(seed, replicate, column, purpose)`. Streams are derived by hashing the key
//! with SplitMix64 finalizers and seeding a Xoshiro256++ generator, so any
//! replicate or column can be regenerated in isolation and the result never
//! depends on which thread produced it.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    /// Shared drivers of the dependent column process.
    Drivers = 1,
    /// Per-cell drivers of the matched independent panel.
    Independent = 2,
    /// Auxiliary draws (coupling uniforms and the like).
    Auxiliary = 3,
}

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream_key(seed: u64, replicate: u64, column: u64, purpose: Purpose) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ replicate);
    h = splitmix64(h ^ column);
    splitmix64(h ^ purpose as u64)
}

pub fn stream(seed: u64, replicate: u64, column: u64, purpose: Purpose) -> StreamRng {
    StreamRng::seed_from_u64(stream_key(seed, replicate, column, purpose))
}
