//! Deterministic, splittable random streams.
//!
//! A stream is addressed by (master seed, stream id); identical addresses
//! produce identical variate sequences on every platform and under any
//! thread schedule. The generator is xoshiro256++ seeded through a
//! SplitMix64 chain over the id words, so streams with distinct ids are
//! statistically independent without coordination.

/// What a derived stream is used for; part of the stream address.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Purpose {
    /// Copula sample generation.
    Data,
    /// Per-evaluation latent blocks for the simulated likelihood.
    Smle,
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Data => 0x44415441, // "DATA"
            Purpose::Smle => 0x534d4c45, // "SMLE"
        }
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A single owned random stream. Value-like and movable across threads;
/// not meant to be shared concurrently.
#[derive(Clone, Debug)]
pub struct RngStream {
    state: [u64; 4],
}

impl RngStream {
    /// Stream for a (replication, purpose) pair.
    pub fn new(master_seed: u64, replication: u64, purpose: Purpose) -> Self {
        Self::from_words(master_seed, &[replication, purpose.tag()])
    }

    /// Stream addressed by an arbitrary word sequence (cell coordinates,
    /// replication index, purpose, ...).
    pub fn from_words(master_seed: u64, words: &[u64]) -> Self {
        let mut h = master_seed;
        let mut acc = splitmix64(&mut h);
        for &w in words {
            h ^= w.wrapping_mul(0x9E37_79B9_7F4A_7C15);
            acc ^= splitmix64(&mut h);
        }
        let mut seed_state = acc;
        let mut state = [0u64; 4];
        for s in &mut state {
            *s = splitmix64(&mut seed_state);
        }
        // xoshiro256++ requires a nonzero state; splitmix output of any seed
        // is nonzero in practice, but keep the guarantee explicit
        if state.iter().all(|&s| s == 0) {
            state[0] = 0x9E37_79B9_7F4A_7C15;
        }
        RngStream { state }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0]
            .wrapping_add(s[3])
            .rotate_left(23)
            .wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw on the open interval (0,1).
    #[inline]
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Unit exponential by inverse transform, -log(1-u).
    #[inline]
    pub fn next_exp(&mut self) -> f64 {
        -(-self.next_open01()).ln_1p()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_across_constructions() {
        let mut a = RngStream::new(42, 7, Purpose::Data);
        let mut b = RngStream::new(42, 7, Purpose::Data);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_ids_diverge() {
        let mut a = RngStream::new(42, 7, Purpose::Data);
        let mut b = RngStream::new(42, 8, Purpose::Data);
        let mut c = RngStream::new(42, 7, Purpose::Smle);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn open01_bounds_and_mean() {
        let mut r = RngStream::new(1, 0, Purpose::Data);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let u = r.next_open01();
            assert!(u > 0.0 && u < 1.0);
            sum += u;
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 4.0 / (12f64 * n as f64).sqrt());
    }

    #[test]
    fn stream_cross_correlation_is_noise() {
        let n = 100_000;
        let mut a = RngStream::new(99, 0, Purpose::Data);
        let mut b = RngStream::new(99, 1, Purpose::Data);
        let mut sxy = 0.0;
        for _ in 0..n {
            sxy += (a.next_open01() - 0.5) * (b.next_open01() - 0.5);
        }
        let rho = sxy / n as f64 / (1.0 / 12.0);
        assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "rho = {rho}");
    }

    #[test]
    fn exponential_mean() {
        let mut r = RngStream::new(5, 0, Purpose::Data);
        let n = 200_000;
        let mean: f64 = (0..n).map(|_| r.next_exp()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt());
    }
}
