//! Platform-stable pseudo-random numbers.
//!
//! `RandomSource` wraps the xoshiro256** generator (seeded through
//! splitmix64) with ziggurat normals. Both algorithms are fixed by their
//! crates, so a seed pins the full sequence on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256StarStar;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finalizer: a bijective 64-bit avalanche mix.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one task of a sweep.
///
/// `mix64(mix64(master ^ mix64(grid + γ)) ^ mix64(rep + 2γ))` with γ the
/// golden-ratio increment. Swapping `grid_index` and `repetition` yields a
/// different seed because the two inputs are offset by different constants.
pub fn derive_seed(master: u64, grid_index: u64, repetition: u64) -> u64 {
    let a = mix64(master ^ mix64(grid_index.wrapping_add(GOLDEN_GAMMA)));
    mix64(a ^ mix64(repetition.wrapping_add(GOLDEN_GAMMA.wrapping_mul(2))))
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: Xoshiro256StarStar,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: Xoshiro256StarStar::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    /// Index drawn from a cumulative table whose last entry is the total mass.
    pub fn categorical_cumulative(&mut self, cumulative: &[f64]) -> usize {
        let total = *cumulative.last().expect("empty categorical table");
        let u = self.uniform() * total;
        let idx = cumulative.partition_point(|&c| c <= u);
        idx.min(cumulative.len() - 1)
    }

    /// Index drawn proportional to nonnegative `weights`.
    pub fn categorical(&mut self, weights: &[f64]) -> usize {
        self.categorical_cumulative(&cumulative(weights))
    }
}

/// Running sums of `weights` (negative entries count as zero).
pub fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|&w| {
            acc += w.max(0.0);
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_seeds_equal_streams() {
        let mut a = RandomSource::new(42);
        let mut b = RandomSource::new(42);
        for _ in 0..100_000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = RandomSource::new(43);
        let mut a = RandomSource::new(42);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn pinned_stream_prefix() {
        // frozen so a change of generator is caught
        let mut r = RandomSource::new(0);
        let first: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        assert_eq!(
            first,
            [0x99ec_5f36_cb75_f2b4, 0xbf6e_1f78_4956_452a, 0x1a5f_849d_4933_e6e0]
        );
        assert_eq!(mix64(0), 0);
        assert_eq!(mix64(GOLDEN_GAMMA), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn derive_seed_distinguishes_inputs() {
        let s = 1234;
        assert_eq!(derive_seed(s, 0, 0), derive_seed(s, 0, 0));
        assert_ne!(derive_seed(s, 0, 0), derive_seed(s, 0, 1));
        assert_ne!(derive_seed(s, 1, 0), derive_seed(s, 0, 1));
        assert_ne!(derive_seed(s, 0, 0), derive_seed(s + 1, 0, 0));
    }

    #[test]
    fn uniform_and_normal_moments() {
        let mut r = RandomSource::new(7);
        let n = 200_000;
        let (mut su, mut sz, mut szz) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            su += u;
            let z = r.standard_normal();
            sz += z;
            szz += z * z;
        }
        let n = n as f64;
        assert!((su / n - 0.5).abs() < 4.0 * (1.0 / 12.0 / n).sqrt());
        assert!((sz / n).abs() < 4.0 / n.sqrt());
        assert!((szz / n - 1.0).abs() < 4.0 * (2.0 / n).sqrt());
    }

    #[test]
    fn categorical_frequencies() {
        let mut r = RandomSource::new(3);
        let w = [0.2, 0.0, 0.5, 0.3];
        let mut counts = [0u32; 4];
        let n = 100_000;
        for _ in 0..n {
            counts[r.categorical(&w)] += 1;
        }
        assert_eq!(counts[1], 0);
        for (k, &p) in w.iter().enumerate() {
            let f = counts[k] as f64 / n as f64;
            assert!((f - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt() + 1e-12);
        }
    }
}
