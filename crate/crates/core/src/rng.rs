//! Seeded, platform-independent random streams.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit seed. ChaCha output
//! is defined byte-for-byte, so the same seed yields the same stream on every
//! platform. Child streams are derived from the parent *seed* (never from the
//! parent's position) with a SplitMix64 finalizer, so a trial's stream does
//! not depend on how much randomness earlier trials consumed.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matcore::DenseMatrix;

/// Seed used when a caller does not supply a stream for power iteration.
pub const DEFAULT_POWER_SEED: u64 = 0x5EED;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a path of indices.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &i| splitmix64(acc ^ splitmix64(i.wrapping_add(0xA5A5))))
}

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream identified by `index`, derived from this stream's seed.
    pub fn fork(&self, index: u64) -> Rng {
        Rng::new(derive_seed(self.seed, &[index]))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval (0, 1), 52 random bits.
    pub fn open01(&mut self) -> f64 {
        let bits = self.next_u64() >> 12;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
    }

    /// Uniform on the open interval (-1, 1) from 53 random bits.
    ///
    /// Returns `(2k + 1 - 2^53) / 2^53` for a uniform 53-bit `k`; every value
    /// is exactly representable, so the endpoints are never produced and
    /// the distribution is symmetric about zero.
    pub fn uniform_pm1(&mut self) -> f64 {
        let k = (self.next_u64() >> 11) as i64;
        (2 * k + 1 - (1i64 << 53)) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// +1 or -1 with equal probability.
    pub fn rademacher(&mut self) -> f64 {
        if self.next_u64() >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize, std_dev: f64) -> DenseMatrix {
        let data = (0..rows * cols).map(|_| std_dev * self.normal()).collect();
        DenseMatrix::from_parts(rows, cols, data)
    }
}
