//! Deterministic, splittable random streams.
//!
//! A [`SeedTree`] is derived from a single master seed and split by index
//! (replicate, purpose, ...). Each node hands out [`TrialStreams`]: one
//! ChaCha8 stream per trial, subdivided into disjoint column substreams by
//! word position. Every random draw in the crate is therefore a pure
//! function of `(master seed, path, trial, column)`, which is what makes
//! parallel campaigns bit-reproducible regardless of scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved for each column substream inside one trial stream.
const SUBSTREAM_WORDS: u128 = 1 << 48;
/// Maximum number of substreams per trial (ChaCha streams hold 2^68 words).
pub const MAX_SUBSTREAMS: u64 = 1 << 20;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in the seed hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedTree {
    key: [u64; 4],
}

impl SeedTree {
    pub fn new(master_seed: u64) -> Self {
        let mut key = [0u64; 4];
        let mut state = master_seed;
        for word in &mut key {
            state = splitmix64(state);
            *word = state;
        }
        Self { key }
    }

    /// Independent child node, e.g. one per replicate.
    pub fn child(&self, index: u64) -> Self {
        let salt = splitmix64(index ^ 0xD1B5_4A32_D192_ED03);
        let mut key = [0u64; 4];
        for (i, word) in key.iter_mut().enumerate() {
            *word = splitmix64(self.key[i] ^ salt.rotate_left(16 * i as u32) ^ (i as u64));
        }
        Self { key }
    }

    /// Streams for trial `index` under this node.
    pub fn trial(&self, index: u64) -> TrialStreams {
        TrialStreams {
            seed: self.seed_bytes(),
            trial: index,
        }
    }

    /// A single stream for one-off draws at this node.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.seed_bytes())
    }

    fn seed_bytes(&self) -> [u8; 32] {
        let mut bytes = [0u8; 32];
        for (chunk, word) in bytes.chunks_exact_mut(8).zip(self.key) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        bytes
    }
}

/// The random streams belonging to one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStreams {
    seed: [u8; 32],
    trial: u64,
}

impl TrialStreams {
    /// Convenience for standalone use: trial 0 of the root of `master_seed`.
    pub fn from_seed(master_seed: u64) -> Self {
        SeedTree::new(master_seed).trial(0)
    }

    pub fn trial_index(&self) -> u64 {
        self.trial
    }

    /// The substream owned by column `j`.
    pub fn column(&self, j: usize) -> ChaCha8Rng {
        self.substream(j as u64)
    }

    /// Substream `index`; panics if `index >= MAX_SUBSTREAMS`.
    pub fn substream(&self, index: u64) -> ChaCha8Rng {
        assert!(index < MAX_SUBSTREAMS, "substream index {index} out of range");
        let mut rng = ChaCha8Rng::from_seed(self.seed);
        rng.set_stream(self.trial);
        rng.set_word_pos(u128::from(index) * SUBSTREAM_WORDS);
        rng
    }
}
