//! Deterministic pseudo-randomness for the simulator and experiment sampling.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood; reference implementation
//! by Sebastiano Vigna at <https://prng.di.unimi.it/splitmix64.c>): the state
//! advances by a fixed odd constant and each output is a bijective mix of the
//! state. It is trivial to port bit-exactly to other languages, which is the
//! point — every replication of an experiment must draw identical bits.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream for substream `index` of `master`: seeded with what would be
    /// the `(index + 1)`-th output of a master-seeded generator, so streams
    /// for different indices never share a phase in practice and adding a
    /// substream leaves existing ones untouched.
    pub fn substream(master: u64, index: u64) -> Self {
        let state = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
        SplitMix64::new(mix(state))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform double in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli(p) draw; p = 1 always succeeds, p = 0 never does.
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }
}
