//! Portable, counter-based random streams.
//!
//! Every random decision in the crate (bootstrap replicates, fold shuffles,
//! forest feature subsets, synthetic signals) draws from a [`Stream`], so a
//! given seed reproduces the same numbers on every platform and toolchain.
//!
//! Generator: SplitMix64 in counter form. Output `i` (starting at 0) of a
//! stream with key `k` is `mix(k + (i + 1) * GAMMA)` with
//!
//! ```text
//! GAMMA = 0x9E37_79B9_7F4A_7C15
//! mix(z):  z = (z ^ (z >> 30)) * 0xBF58_476D_1CE4_E5B9
//!          z = (z ^ (z >> 27)) * 0x94D0_49BB_1331_11EB
//!          z ^ (z >> 31)
//! ```
//!
//! (all arithmetic wrapping mod 2^64). Child streams are keyed by
//! `mix(parent_key ^ mix(tag + GAMMA))`.

pub const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream {
            key: seed,
            counter: 0,
        }
    }

    /// Independent child stream identified by `tag`.
    pub fn child(&self, tag: u64) -> Stream {
        Stream::new(derive_key(self.key, tag))
    }

    /// Stream for a path of tags, e.g. `[fold, member]`.
    pub fn derive(seed: u64, tags: &[u64]) -> Stream {
        let key = tags.iter().fold(seed, |k, &t| derive_key(k, t));
        Stream::new(key)
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by rejection (no modulo bias). `n` must be > 0.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal deviate by the Box-Muller transform (one value per two draws).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher-Yates shuffle, iterating from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `len` indices drawn uniformly with replacement from `0..n`.
    pub fn bootstrap(&mut self, n: usize, len: usize) -> Vec<usize> {
        (0..len).map(|_| self.below(n as u64) as usize).collect()
    }

    /// `count` distinct indices from `0..n` (partial Fisher-Yates), in draw order.
    pub fn sample_without_replacement(&mut self, n: usize, count: usize) -> Vec<usize> {
        let count = count.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(count);
        pool
    }
}

fn derive_key(key: u64, tag: u64) -> u64 {
    mix(key ^ mix(tag.wrapping_add(GAMMA)))
}
