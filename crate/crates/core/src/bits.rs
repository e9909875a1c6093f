//! Counter-based random bits: any vertex's stream can be recomputed anywhere.

use std::sync::Arc;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Source of per-vertex streams for one run. `epochs[v]` selects a fresh stream
/// for `v` and is bumped whenever `v`'s bits are resampled.
#[derive(Clone, Debug, Default)]
pub struct BitSource {
    seed: u64,
    epochs: Option<Arc<Vec<u64>>>,
}

impl BitSource {
    pub fn new(seed: u64) -> Self {
        BitSource { seed, epochs: None }
    }

    pub fn with_epochs(seed: u64, epochs: Arc<Vec<u64>>) -> Self {
        BitSource { seed, epochs: Some(epochs) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, v: usize) -> BitStream {
        let epoch = self.epochs.as_ref().map_or(0, |e| e[v]);
        BitStream { seed: self.seed, vertex: v as u64, epoch }
    }
}

/// Opaque handle to one vertex's infinite bit string.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitStream {
    seed: u64,
    vertex: u64,
    epoch: u64,
}

impl BitStream {
    fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.vertex.to_le_bytes());
        key[16..24].copy_from_slice(&self.epoch.to_le_bytes());
        key[24..].copy_from_slice(b"lclbits!");
        ChaCha8Rng::from_seed(key)
    }

    pub fn word(&self, i: u64) -> u64 {
        let mut r = self.rng();
        r.set_word_pos(2 * i as u128);
        r.next_u64()
    }

    pub fn bit(&self, i: u64) -> bool {
        self.word(i / 64) >> (i % 64) & 1 == 1
    }

    /// Same vertex, different epoch: an independent stream.
    pub fn with_epoch(&self, epoch: u64) -> BitStream {
        BitStream { epoch, ..*self }
    }

    /// An independent stream derived from this one, for auxiliary vertices.
    pub fn derived(&self, tag: u64) -> BitStream {
        BitStream { vertex: self.vertex ^ (tag.wrapping_add(1) << 40), epoch: self.epoch ^ 0x5eed_0000_0000, ..*self }
    }

    /// Uniform value in `[0, m)` drawn from word `i` (negligible bias for small `m`).
    pub fn below(&self, i: u64, m: u64) -> u64 {
        ((self.word(i) as u128 * m as u128) >> 64) as u64
    }
}
