//! Keyed random streams for reproducible parallel simulation.
//!
//! Every (run, arm) pair owns a dedicated ChaCha stream whose key is derived
//! from (master seed, run id, arm id); the k-th draw from a stream plays the
//! role of pull index k. Runs therefore produce identical reward sequences
//! no matter how they are scheduled across threads, and two algorithms run
//! with the same seed see the same rewards for the same pull of the same
//! arm.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Per-run collection of per-arm reward streams.
#[derive(Debug, Clone)]
pub struct RewardStreams {
    streams: Vec<ChaCha8Rng>,
}

impl RewardStreams {
    pub fn new(master_seed: u64, run_id: u64, num_arms: usize) -> Self {
        let streams = (0..num_arms)
            .map(|arm| ChaCha8Rng::from_seed(derive_seed(master_seed, run_id, arm as u64)))
            .collect();
        Self { streams }
    }

    /// Uniform draw in the open interval (0, 1) from `arm`'s stream.
    pub fn draw_uniform(&mut self, arm: usize) -> f64 {
        let bits = self.streams[arm].next_u64();
        ((bits >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

/// SplitMix64 finalizer; bijective on u64.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9e3779b97f4a7c15;

/// Absorb the key words sequentially, then expand to a 32-byte ChaCha seed.
fn derive_seed(master_seed: u64, run_id: u64, arm_id: u64) -> [u8; 32] {
    let mut state = mix(master_seed ^ GOLDEN);
    state = mix(state ^ run_id);
    state = mix(state ^ arm_id);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        state = state.wrapping_add(GOLDEN);
        chunk.copy_from_slice(&mix(state).to_le_bytes());
    }
    seed
}
