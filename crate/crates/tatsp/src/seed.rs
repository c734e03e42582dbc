//! Seed derivation for splittable randomness.
//!
//! Every seeded component (suite generation, search iterations, bench cells)
//! derives child seeds with [`mix_seed`] so that streams stay independent and
//! reproducible across platforms and thread counts.

/// Derives a child seed from a base seed and an ordinal (splitmix64-style
/// finalizer). Equal inputs give equal outputs on every platform.
pub fn mix_seed(base: u64, ordinal: u64) -> u64 {
    let mut z = base ^ ordinal.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
