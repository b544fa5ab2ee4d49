//! Counter-based seed derivation.
//!
//! Every random stream in the crate is keyed by a master seed and a path of
//! integer labels, so results never depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream labels used below a master seed.
pub mod stream {
    pub const POPULATION: u64 = 1;
    pub const SIMULATION: u64 = 2;
    pub const RESOLVERS: u64 = 3;
    pub const FULL_CLIENTS: u64 = 4;
    pub const MEASUREMENT: u64 = 5;
    pub const TRUTH: u64 = 6;
    pub const SAMPLING: u64 = 7;
    pub const BOOTSTRAP: u64 = 8;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed of `seed` for the stream `label`.
#[inline]
pub fn derive(seed: u64, label: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(label.wrapping_add(0x632B_E59B_D9B4_E019)))
}

/// Child seed along a path of labels.
pub fn derive_path(seed: u64, labels: &[u64]) -> u64 {
    labels.iter().fold(seed, |s, &l| derive(s, l))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
