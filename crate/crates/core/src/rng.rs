//! Seed derivation for reproducible, parallel trials.
//!
//! Every random stream in the crate is a ChaCha8 generator keyed by a 64-bit
//! seed and a 64-bit stream id. ChaCha is counter-based, so two streams with
//! the same key but different stream ids never overlap, and a stream can be
//! re-created from `(seed, stream)` alone on any thread.
//!
//! Sub-seeds are derived with the SplitMix64 finalizer:
//!
//! ```text
//! derive(seed, tag) = splitmix64(seed ^ splitmix64(tag))
//! ```
//!
//! A trial seed feeds the feature sampler under [`Stream::Features`], the
//! graph sampler under [`Stream::Graph`], and the trainer under
//! [`Stream::Init`] / [`Stream::Split`] / [`Stream::Dropout`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named stream ids. The numeric values are part of the reproducibility
/// contract and must not change.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Features = 1,
    Graph = 2,
    Init = 3,
    Split = 4,
    Dropout = 5,
    MonteCarlo = 6,
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and an arbitrary tag.
pub fn derive(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// A generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, stream as u64));
    rng.set_stream(stream as u64);
    rng
}

/// Seed of trial `trial` inside grid cell `cell`, independent of execution order.
pub fn trial_seed(base: u64, cell: u64, trial: u64) -> u64 {
    derive(derive(base, cell), trial)
}
