//! Seed derivation for independent random streams.
//!
//! Every stochastic draw in a simulation comes from a ChaCha stream whose seed
//! is a hash of a base seed and a path of integers (episode, phase, attempt).
//! Streams never share state, so the draws of one attempt do not depend on how
//! many draws earlier attempts made.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Stream tags used to separate the phases of one episode.
pub mod phase {
    pub const PERCEPT: u64 = 1;
    pub const IMPLICIT: u64 = 2;
    pub const EXPLICIT: u64 = 3;
    pub const TRACE: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(base: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive_seed(base, path))
}

/// Produces a fresh stream for every attempt index of a retrieval loop.
pub trait AttemptStreams {
    fn attempt(&self, index: u64) -> SimRng;
}

/// Attempt streams keyed by `(base, path.., index)`.
#[derive(Debug, Clone)]
pub struct KeyedStreams {
    base: u64,
    path: Vec<u64>,
}

impl KeyedStreams {
    pub fn new(base: u64, path: &[u64]) -> Self {
        Self {
            base,
            path: path.to_vec(),
        }
    }
}

impl AttemptStreams for KeyedStreams {
    fn attempt(&self, index: u64) -> SimRng {
        let mut path = self.path.clone();
        path.push(index);
        stream(self.base, &path)
    }
}
