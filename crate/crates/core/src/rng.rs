//! Deterministic pseudo-random number generator.
//!
//! All stochastic behavior in the crate (synthetic data, K-Means++ seeding,
//! train/test shuffling) is driven by SplitMix64 so that a given seed yields
//! the same stream on every platform and release. The generator is small
//! enough to re-implement bit-for-bit elsewhere, which keeps results
//! reproducible outside this codebase too.

/// SplitMix64 generator (Steele, Lea & Flood's `splitmix64` finalizer).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Next 64 uniformly distributed bits.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)` built from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate via Box-Muller.
    ///
    /// Two fresh uniforms per call (no caching of the second deviate, so the
    /// stream position is easy to reason about). The first uniform is shifted
    /// into `(0, 1]` to keep `ln` finite.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher-Yates shuffle.
    ///
    /// Indices are drawn as `next_u64() % (i + 1)`; the modulo bias is
    /// negligible for the slice sizes used here and keeps the draw sequence
    /// trivially portable.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = (self.next_u64() % (i as u64 + 1)) as usize;
            items.swap(i, j);
        }
    }
}
