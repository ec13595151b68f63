//! Deterministic pseudo-random numbers for reproducible sampling.
//!
//! The generator is SplitMix64 (Steele, Lea, Flood 2014), chosen because the
//! algorithm is short enough to re-implement bit-exactly in any language:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Doubles are drawn by taking the top 53 bits of an output word, so every
//! seeded stream produces identical values on every platform. Independent
//! streams for trial `i` under seed `s` start from
//! `s + i * 0x9E3779B97F4A7C15` (wrapping); this is the documented splitting
//! rule used by the convexity scanner and the symmetry checks.

const GOLDEN_GAMMA: u64 = 0x9E3779B97F4A7C15;

/// SplitMix64 generator with a 64-bit state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream for trial index `stream` under `seed`; see the module docs.
    pub fn stream(seed: u64, stream: u64) -> Self {
        SplitMix64::new(seed.wrapping_add(stream.wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform draw from `[0, 1)` using the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_first_outputs_for_seed_zero() {
        // Reference values from the published SplitMix64 algorithm.
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220A8397B1DCDAF);
        assert_eq!(g.next_u64(), 0x6E789E6AA1B965F4);
        assert_eq!(g.next_u64(), 0x06C45D188009454F);
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let mut a1 = SplitMix64::stream(7, 0);
        let mut a2 = SplitMix64::stream(7, 0);
        let mut b = SplitMix64::stream(7, 1);
        let x1 = a1.next_u64();
        assert_eq!(x1, a2.next_u64());
        assert_ne!(x1, b.next_u64());
    }

    #[test]
    fn uniform_stays_in_range() {
        let mut g = SplitMix64::new(42);
        for _ in 0..1000 {
            let v = g.uniform(-2.0, 2.0);
            assert!((-2.0..2.0).contains(&v));
        }
    }
}
