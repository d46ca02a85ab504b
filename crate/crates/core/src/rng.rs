//! Counter-based random number streams for reproducible sampling.
//!
//! Each experimental trial gets its own substream derived from the run seed
//! and the trial index, so a log is bit-identical no matter how the trial
//! indices are partitioned across workers.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood 2014): the substream
//! state is `mix(mix(seed) ^ mix(index + 1))` and each draw advances the
//! state by the golden-ratio increment and applies the mix finalizer.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One per-trial random stream.
#[derive(Debug, Clone)]
pub struct TrialRng {
    state: u64,
}

impl TrialRng {
    /// Substream for trial `index` of the run keyed by `seed`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self {
            state: mix(mix(seed) ^ mix(index.wrapping_add(1))),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from {0, 1, ..., n-1} by rejection, unbiased.
    pub fn next_below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }
}
