//! Portable seeded sampling.
//!
//! Every random choice in the crate goes through [`SeededRng`], a ChaCha8
//! stream seeded with `ChaCha8Rng::seed_from_u64`. Bounded integers are drawn
//! by rejection from raw `next_u64` output rather than through `rand`'s
//! distribution machinery, so the sequence depends only on the ChaCha8 stream
//! and stays identical across platforms and crate versions.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound`.
    ///
    /// Draws are rejected when they fall in the incomplete top block of the
    /// `u64` range, so the result is exactly uniform.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.inner.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// In-place Fisher-Yates shuffle, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct values from `0..total`, in draw order (partial Fisher-Yates).
    pub fn sample_indices(&mut self, total: usize, k: usize) -> Vec<usize> {
        assert!(k <= total);
        let mut pool: Vec<usize> = (0..total).collect();
        for i in 0..k {
            let j = i + self.below((total - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        for _ in 0..16 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn below_stays_in_range() {
        let mut rng = SeededRng::new(3);
        for bound in 1..50u64 {
            for _ in 0..20 {
                assert!(rng.below(bound) < bound);
            }
        }
    }

    #[test]
    fn sample_indices_distinct() {
        let mut rng = SeededRng::new(9);
        let mut s = rng.sample_indices(100, 40);
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 40);
        assert!(s.iter().all(|&x| x < 100));
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut rng = SeededRng::new(1);
        let mut v: Vec<usize> = (0..30).collect();
        rng.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..30).collect::<Vec<_>>());
    }
}
