//! Seed derivation. Every random quantity comes from a ChaCha8 stream keyed
//! by the master seed and a short path of labels, so unrelated consumers
//! never share draws and adding one never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const COHORT: u64 = 1;
pub const ARRIVALS: u64 = 2;
/// Per-arm stream: initial state, then one transition draw per step.
pub const ARM: u64 = 3;
pub const POLICY: u64 = 4;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds a label path into a child seed.
pub fn derive(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &label| splitmix64(acc ^ splitmix64(label).rotate_left(23)))
}

pub fn stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, path))
}
