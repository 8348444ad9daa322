//! Counter-based seed splitting.
//!
//! Every random stream in the crate is keyed by a 64-bit master seed plus a
//! path of integer labels (replica index, restart index, block code, ...).
//! Streams never depend on the order in which other streams were consumed,
//! so parallel runs are bit-reproducible regardless of worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and a label path.
pub fn derive(seed: u64, labels: &[u64]) -> u64 {
    let mut state = mix(seed.wrapping_add(GOLDEN));
    for (depth, &label) in labels.iter().enumerate() {
        state = mix(state ^ mix(label.wrapping_add(GOLDEN.wrapping_mul(depth as u64 + 2))));
    }
    state
}

/// A ChaCha8 generator for the stream at `labels` under `seed`.
pub fn stream(seed: u64, labels: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(seed, labels))
}

/// Stream-domain tags, so that e.g. replica 3 of one experiment never
/// collides with restart 3 of another.
pub mod tag {
    pub const DISORDER: u64 = 1;
    pub const RESTART: u64 = 2;
    pub const TENSOR: u64 = 3;
    pub const CONFIG: u64 = 4;
    pub const PATH: u64 = 5;
    pub const SPEC: u64 = 6;
    pub const REPLICA: u64 = 7;
}
