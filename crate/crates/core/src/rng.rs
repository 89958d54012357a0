//! SplitMix64, used as a counter-based generator.
//!
//! The `k`-th output of a stream seeded with `s` is `mix(s + (k+1)·GAMMA)`, so
//! any draw can be recomputed from `(seed, counter)` without replaying the
//! stream. This makes every experiment reproducible from its seeds alone.

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX2: u64 = 0x94D0_49BB_1331_11EB;

#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX2);
    z ^ (z >> 31)
}

/// The `counter`-th output of the stream seeded with `seed`.
#[inline]
pub fn at(seed: u64, counter: u64) -> u64 {
    mix(seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)))
}

/// Derives an independent seed for a named sub-stream.
#[inline]
pub fn substream(seed: u64, stream: u64) -> u64 {
    mix(seed ^ mix(stream.wrapping_add(GAMMA)))
}

/// Maps 64 random bits to a uniform double in `[0, 1)`.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix(self.state)
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
