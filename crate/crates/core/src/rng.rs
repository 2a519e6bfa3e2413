//! 64-bit linear congruential generator used for reproducible random data.
//!
//! `state ← state · 6364136223846793005 + 1442695040888963407 (mod 2⁶⁴)`;
//! a uniform draw in `[0, 1)` takes the top 53 bits of the new state.

#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn fill(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| self.uniform(lo, hi)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_draws_are_pinned() {
        let mut rng = Lcg::new(0);
        assert_eq!(rng.next_u64(), Lcg::INCREMENT);
        assert_eq!(
            rng.next_u64(),
            Lcg::INCREMENT
                .wrapping_mul(Lcg::MULTIPLIER)
                .wrapping_add(Lcg::INCREMENT)
        );
    }

    #[test]
    fn draws_stay_in_unit_interval() {
        let mut rng = Lcg::new(7);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
