//! Portable seeded randomness.
//!
//! Subsets and splits must be reproducible from a seed in any language, so the
//! generator and the shuffle are pinned by algorithm rather than delegated to a
//! library whose stream may change between releases:
//!
//! * [`SplitMix64`] (Steele, Lea & Flood), the reference 64-bit variant.
//! * Bounded draws use Lemire's widening-multiply rejection method.
//! * [`shuffle`] is the Durstenfeld form of Fisher–Yates, walking `i` from
//!   `n - 1` down to `1` and swapping with `j = below(i + 1)`.

/// SplitMix64 pseudo-random generator.
#[derive(Debug, Clone)]
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

    /// Uniform integer in `0..bound`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut wide = u128::from(self.next_u64()) * u128::from(bound);
        let mut low = wide as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                wide = u128::from(self.next_u64()) * u128::from(bound);
                low = wide as u64;
            }
        }
        (wide >> 64) as u64
    }
}

/// In-place Fisher–Yates shuffle.
pub fn shuffle<T>(items: &mut [T], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.below(i as u64 + 1) as usize;
        items.swap(i, j);
    }
}

/// 64-bit FNV-1a, used to derive per-stratum subseeds from origin names.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Round half up to an integer count, capped at `n`.
pub(crate) fn round_count(fraction: f64, n: usize) -> usize {
    let k = (fraction * n as f64 + 0.5).floor();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(n)
    }
}
