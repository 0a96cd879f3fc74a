//! Seed derivation and RNG construction.
//!
//! Every random stream in the crate is a `ChaCha8Rng` whose seed is derived
//! from a master seed and a path of integer labels, so concurrent work items
//! never share state and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `parts` into `seed`. Order-sensitive.
pub fn derive(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream labels used across modules.
pub mod stream {
    pub const SHARD: u64 = 0x5348_4152_44;
    pub const SCHEDULE: u64 = 0x5343_4845_44;
    pub const LEARNER: u64 = 0x4C45_4152_4E;
    pub const TEACHER: u64 = 0x5445_4143_48;
    pub const EVAL: u64 = 0x4556_414C;
    pub const CELL: u64 = 0x4345_4C4C;
    pub const RUN: u64 = 0x5255_4E;
}
