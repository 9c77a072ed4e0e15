//! Seeded generation of rational points with denominators that hit the
//! breakpoints of the built-in copulas.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::{ratio, Rational};

const MAX_DENOMINATOR: i128 = 1 << 20;

/// Draws coordinates `p/q` with `q` taken from a fixed denominator set and
/// `p` uniform in `0..=q`.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    denominators: Vec<i128>,
}

impl Sampler {
    /// Dyadic denominators up to 64, the `(d+1)`-adic ones `d+1, 2(d+1),
    /// 4(d+1), 20(d+1)`, and every entry of `extra` below `2^20`.
    pub fn new(seed: u64, d: usize, extra: &[i128]) -> Self {
        let big_d = d as i128 + 1;
        let mut denominators: Vec<i128> =
            vec![2, 4, 8, 16, 32, 64, big_d, 2 * big_d, 4 * big_d, 20 * big_d];
        denominators.extend(
            extra
                .iter()
                .copied()
                .filter(|&q| q > 0 && q <= MAX_DENOMINATOR),
        );
        denominators.sort_unstable();
        denominators.dedup();
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            denominators,
        }
    }

    pub fn denominators(&self) -> &[i128] {
        &self.denominators
    }

    pub fn coord(&mut self) -> Rational {
        let q = *self.denominators.choose(&mut self.rng).expect("nonempty");
        ratio(self.rng.gen_range(0..=q), q)
    }

    pub fn point(&mut self, d: usize) -> Vec<Rational> {
        (0..d).map(|_| self.coord()).collect()
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
