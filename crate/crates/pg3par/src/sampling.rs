//! Deterministic counter-based sampling.
//!
//! Every verification run derives one generator per sample from a
//! `(seed, counter)` pair, so results do not depend on how samples are
//! split across worker threads. The stream is xorshift64* seeded through
//! a splitmix64 finalizer; fast, reproducible, not cryptographic.

use nalgebra::Vector3;

/// Deterministic RNG addressed by `(seed, counter)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    state: u64,
}

impl CounterRng {
    /// Generator for sample `counter` of the run identified by `seed`.
    pub fn new(seed: u64, counter: u64) -> Self {
        let mut state = splitmix64(seed ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        if state == 0 {
            state = 0x4D59_5DF4_D0F3_3173;
        }
        Self { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Log-uniform in `[lo, hi)`, both bounds positive.
    pub fn log_uniform(&mut self, lo: f64, hi: f64) -> f64 {
        debug_assert!(lo > 0.0 && hi > lo);
        (self.uniform(lo.ln(), hi.ln())).exp()
    }

    /// Standard Cauchy deviate: symmetric and heavy-tailed.
    pub fn cauchy(&mut self) -> f64 {
        (std::f64::consts::PI * (self.next_f64() - 0.5)).tan()
    }

    /// Uniform direction on the unit 2-sphere.
    pub fn unit_vector(&mut self) -> Vector3<f64> {
        let z = self.uniform(-1.0, 1.0);
        let phi = self.uniform(0.0, std::f64::consts::TAU);
        let r = (1.0 - z * z).max(0.0).sqrt();
        Vector3::new(r * phi.cos(), r * phi.sin(), z)
    }

    /// Uniform point on the unit 3-sphere, returned as four coordinates.
    pub fn unit_4vector(&mut self) -> [f64; 4] {
        // Marsaglia: two unit discs patched together.
        loop {
            let (a, b) = (self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0));
            let s1 = a * a + b * b;
            if s1 >= 1.0 {
                continue;
            }
            let (c, d) = (self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0));
            let s2 = c * c + d * d;
            if s2 >= 1.0 || s2 == 0.0 {
                continue;
            }
            let scale = ((1.0 - s1) / s2).sqrt();
            return [a, b, c * scale, d * scale];
        }
    }
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
