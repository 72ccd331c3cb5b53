//! Deterministic pseudo-random numbers for splits, sampling and bootstrap.
//!
//! Reproducibility across independent implementations is part of this
//! crate's contract, so instead of an external generator we pin the exact
//! algorithm here: SplitMix64 (Steele, Lea & Flood 2014), the same generator
//! used to seed many other PRNGs.  The full specification, so that another
//! implementation can reproduce every stream bit for bit:
//!
//! ```text
//! state' = state + 0x9E3779B97F4A7C15                 (mod 2^64)
//! z = state'
//! z = (z xor (z >> 30)) * 0xBF58476D1CE4E5B9          (mod 2^64)
//! z = (z xor (z >> 27)) * 0x94D049BB133111EB          (mod 2^64)
//! output = z xor (z >> 31)
//! ```
//!
//! Derived draws are defined on top of `next_u64`:
//! * `next_index(n)` = `next_u64() mod n` (the tiny modulo bias is accepted
//!   in exchange for a one-line cross-language spec),
//! * `next_f64()` = `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`.

/// SplitMix64 generator. Copyable so call sites can fork deterministic
/// sub-streams by value when needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn next_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_index needs a non-empty range");
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform float in `[0, 1)` with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// First `count` elements of a Fisher-Yates shuffle over `0..n`:
    /// a uniform sample of `count` distinct indices, order as drawn.
    ///
    /// ```text
    /// idx = [0, 1, ..., n-1]
    /// for i in 0..count { j = i + next_index(n - i); swap(idx[i], idx[j]) }
    /// return idx[0..count]
    /// ```
    pub fn sample_without_replacement(&mut self, n: usize, count: usize) -> Vec<usize> {
        assert!(count <= n, "cannot sample {count} of {n} without replacement");
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.next_index(n - i);
            idx.swap(i, j);
        }
        idx.truncate(count);
        idx
    }
}
