//! Seeded random streams.
//!
//! Every episode of every environment draws from its own [`RngStream`],
//! obtained with [`RngStream::derive`] from `(master_seed, env_index,
//! episode_index)`. Nothing is shared between environments, so reassigning
//! the context of one environment can never shift another's random draws.
//!
//! The algorithms below are pinned; changing any constant changes every
//! generated level.
//!
//! * `mix64(z)`: the SplitMix64 finalizer
//!   `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`.
//! * `derive(m, e, k)`:
//!   `h = mix64(m ^ 0x243F6A8885A308D3)`,
//!   `h = mix64(h ^ e * 0x9E3779B97F4A7C15)`,
//!   `state = mix64(h ^ k * 0xD1B54A32D192ED03)` (wrapping multiplies).
//! * `next_u64`: `state += 0x9E3779B97F4A7C15; mix64(state)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const MASTER_SALT: u64 = 0x243F_6A88_85A3_08D3;
const EPISODE_MUL: u64 = 0xD1B5_4A32_D192_ED03;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator with a fixed, documented derivation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn from_state(state: u64) -> Self {
        Self { state }
    }

    /// Stream for one episode of one environment.
    pub fn derive(master: u64, env_index: u64, episode_index: u64) -> Self {
        let h = mix64(master ^ MASTER_SALT);
        let h = mix64(h ^ env_index.wrapping_mul(GOLDEN));
        Self {
            state: mix64(h ^ episode_index.wrapping_mul(EPISODE_MUL)),
        }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform integer in the closed interval `[lo, hi]`.
    ///
    /// Uses Lemire's multiply-and-reject, so the draw is unbiased.
    pub fn uniform_int(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        let span = (hi as i128 - lo as i128 + 1) as u128;
        if span > u64::MAX as u128 {
            return self.next_u64() as i64;
        }
        let span = span as u64;
        let threshold = span.wrapping_neg() % span;
        loop {
            let m = (self.next_u64() as u128) * (span as u128);
            if (m as u64) >= threshold {
                return lo + (m >> 64) as i64;
            }
        }
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index over an empty range");
        self.uniform_int(0, n as i64 - 1) as usize
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform float in the half-open interval `[lo, hi)`; returns `lo` when
    /// the interval is degenerate.
    pub fn uniform_f64(&mut self, lo: f64, hi: f64) -> f64 {
        let u = self.unit_f64();
        if hi <= lo {
            return lo;
        }
        let v = lo + (hi - lo) * u;
        if v >= hi {
            hi.next_down()
        } else {
            v
        }
    }

    /// Bernoulli trial with success probability `p`.
    pub fn chance(&mut self, p: f64) -> bool {
        self.unit_f64() < p
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}
