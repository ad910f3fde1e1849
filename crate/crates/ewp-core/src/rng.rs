//! Seeded, portable randomness with a documented stream-splitting rule.
//!
//! Everything derives from ChaCha8, which is specified byte-exactly and
//! therefore reproducible across platforms. A 64-bit `seed` selects the key
//! and a 64-bit `stream` id selects a disjoint output stream, so consumers
//! that draw from different streams never perturb each other no matter how
//! many values each consumes.
//!
//! Stream map (per seed):
//!   0  solver centroid initialization
//!   1  generator: label / grid-cell draws
//!   2  generator: relevant-feature selection
//!   3  generator: true-centroid draws
//!   4  generator: signal (informative-feature) noise
//!   5  generator: background (uninformative-feature) noise
//!
//! Benchmark replicates each get their own seed via `replicate_seed`, an
//! SplitMix64 hash of (base seed, replicate index); within a replicate all
//! algorithms share stream 0 and therefore identical initial centroids.

use rand::Rng as _;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Stream ids understood by the library. Values above `BACKGROUND_NOISE`
/// are free for downstream use.
pub mod streams {
    pub const SOLVER_INIT: u64 = 0;
    pub const LABELS: u64 = 1;
    pub const RELEVANT_FEATURES: u64 = 2;
    pub const CENTROIDS: u64 = 3;
    pub const SIGNAL_NOISE: u64 = 4;
    pub const BACKGROUND_NOISE: u64 = 5;
}

/// The RNG for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives the seed for one benchmark replicate (SplitMix64 finalizer).
pub fn replicate_seed(base: u64, replicate: u64) -> u64 {
    let mut z = base
        .wrapping_add(replicate.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Samples `k` distinct row indices from `0..n` (partial Fisher-Yates);
/// requires k <= n.
pub fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i as u64..n as u64) as usize;
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}
