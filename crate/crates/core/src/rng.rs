//! Seeded randomness helpers. Everything stochastic in the crate flows
//! through a ChaCha8 generator constructed from an explicit u64 seed, so
//! identical seeds give bit-identical runs.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::vec3::Vec3;

pub fn from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1) with 53-bit resolution.
pub fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on the unit sphere (area measure).
pub fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    let z = 2.0 * uniform01(rng) - 1.0;
    let phi = 2.0 * std::f64::consts::PI * uniform01(rng);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// One random bit.
pub fn bit(rng: &mut ChaCha8Rng) -> u8 {
    (rng.next_u64() & 1) as u8
}

/// Uniform integer in [0, n).
pub fn below(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    // Multiply-shift rejection-free map; bias is ~n/2^64, irrelevant here.
    ((rng.next_u64() as u128 * n as u128) >> 64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = from_seed(42);
        let mut b = from_seed(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn unit_vectors_have_unit_length_and_spread() {
        let mut rng = from_seed(1);
        let mut mean = Vec3::ZERO;
        for _ in 0..2000 {
            let v = unit_vector(&mut rng);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            mean += v;
        }
        assert!((mean / 2000.0).norm() < 0.05);
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = from_seed(3);
        for _ in 0..1000 {
            assert!(below(&mut rng, 6) < 6);
        }
    }
}
