//! Seeded generator with bit-reproducible output across implementations.
//!
//! The state is a 64-bit multiplicative congruential generator
//! `x ← x · 0xd1342543de82ef95 (mod 2^64)` seeded with
//! `splitmix64(seed) | 1` (the state must be odd). Uniform doubles are the
//! top 53 bits of the updated state times `2^-53`.

const MULTIPLIER: u64 = 0xd134_2543_de82_ef95;

#[derive(Debug, Clone)]
pub struct Mcg64 {
    state: u64,
}

impl Mcg64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: splitmix64(seed) | 1,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Index drawn from unnormalized nonnegative weights by inversion.
    /// Negative weights (round-off) count as zero.
    pub fn sample_index(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        let target = self.next_f64() * total;
        let mut cumulative = 0.0;
        let mut last_positive = 0;
        for (k, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            cumulative += w;
            last_positive = k;
            if target < cumulative {
                return k;
            }
        }
        last_positive
    }
}

/// SplitMix64 finalizer (Steele, Lea, Flood), used only for seeding.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
