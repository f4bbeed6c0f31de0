//! Deterministic parameter streams, one per (case id, q, sample index, seed).

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(FNV_OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// A seeded stream for one sample.
pub struct Sampler {
    rng: SplitMix64,
    index: usize,
}

impl Sampler {
    pub fn new(id: &str, q: f64, index: usize, seed: u64) -> Self {
        let mut key = fnv1a(id.as_bytes());
        for word in [q.to_bits(), index as u64, seed] {
            key = (key ^ word).wrapping_mul(FNV_PRIME).rotate_left(29);
        }
        Sampler { rng: SplitMix64::seed_from_u64(key), index }
    }

    /// The sample index, for parameters cycled through a fixed grid.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Cycles through `items` by sample index.
    pub fn cycle<T: Copy>(&self, items: &[T]) -> T {
        items[self.index % items.len()]
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// A magnitude in `[lo, hi)` with a random sign.
    pub fn signed(&mut self, lo: f64, hi: f64) -> f64 {
        let m = self.uniform(lo, hi);
        if self.rng.random_bool(0.5) {
            m
        } else {
            -m
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.rng.random_range(0..items.len())]
    }

    /// `n / d` with `n` in `nums` and `d` in `1..=max_den`, in lowest terms.
    pub fn rational(&mut self, nums: (i64, i64), max_den: i64) -> BigRational {
        let n = self.int(nums.0, nums.1);
        let d = self.int(1, max_den);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// A nonzero rational in the same form.
    pub fn nonzero_rational(&mut self, nums: (i64, i64), max_den: i64) -> BigRational {
        loop {
            let r = self.rational(nums, max_den);
            if r != BigRational::from_integer(0.into()) {
                return r;
            }
        }
    }
}

/// The shortest decimal form of `q` as an exact rational, so `0.3` becomes `3/10`.
pub fn decimal_rational(q: f64) -> BigRational {
    let text = format!("{q}");
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("finite decimal");
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    BigRational::new(digits, scale)
}
