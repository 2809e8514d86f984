//! Order-independent seed derivation for Monte Carlo trials.
//!
//! `mix_seed(master, a, b, c)` folds each word into a SplitMix64 state:
//!
//! ```text
//! h = master
//! for w in [a, b, c]:
//!     h = splitmix64(h ^ splitmix64(w + 0x9E3779B97F4A7C15))
//! ```
//!
//! where `splitmix64(z)` is the standard finalizer
//! `z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) * 0x94D049BB133111EB; z ^ (z >> 31)`
//! with wrapping arithmetic. Experiments call it as `mix_seed(seed, N, M, trial)`.

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix_seed(master: u64, a: u64, b: u64, c: u64) -> u64 {
    [a, b, c].iter().fold(master, |h, &w| {
        splitmix64(h ^ splitmix64(w.wrapping_add(0x9E37_79B9_7F4A_7C15)))
    })
}
