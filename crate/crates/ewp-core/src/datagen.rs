//! Seeded generators for the synthetic benchmark studies: a 10x10 grid of
//! clusters hidden among uniform noise features (`gen_sim1`), Gaussian
//! clusters supported on 5 of 100 features (`gen_sim2`), and the 20-feature
//! feature-selection variant (`gen_feature_sel`).
//!
//! Each generator draws from fixed RNG streams of its seed (see `rng`):
//! labels, relevant-feature choice, centroid draws, signal noise, and
//! background noise are all separate streams, so changing the number of
//! noise features or clusters never shifts the other draws.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::{sample_distinct, stream_rng, streams};
use crate::types::{CentroidSet, DataMatrix, Partition};

/// Standard deviation of the informative-feature noise in both generators.
///
/// Chosen so that clusters are well separated on their informative features
/// (grid spacing 0.1 and unit-box centroids vs. sd 0.015) while the
/// uninformative features drown plain Euclidean distances, which is the
/// regime the benchmark tables probe.
pub const SIGNAL_SD: f64 = 0.015;

/// A generated dataset with its ground truth.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub data: DataMatrix,
    pub truth: Partition,
    /// Indices of the informative features, ascending.
    pub relevant_features: Vec<usize>,
    pub true_centroids: Option<CentroidSet>,
}

/// Grid simulation: n = 1000 points on a 10x10 grid of clusters (k = 100).
/// Feature 1 is Normal(a/10, sd), feature 2 is Normal(b/10, sd) for grid
/// cell (a, b); the remaining `d` features are independent Uniform(0, 2).
pub fn gen_sim1(d: usize, seed: u64) -> LabeledDataset {
    const N: usize = 1000;
    const SIDE: usize = 10;
    let p = d + 2;
    let mut label_rng = stream_rng(seed, streams::LABELS);
    let mut signal_rng = stream_rng(seed, streams::SIGNAL_NOISE);
    let mut background_rng = stream_rng(seed, streams::BACKGROUND_NOISE);
    let noise = Normal::new(0.0, SIGNAL_SD).expect("valid sd");

    let mut labels = Vec::with_capacity(N);
    let mut values = Vec::with_capacity(N * p);
    for _ in 0..N {
        let a = label_rng.gen_range(0..SIDE as u64) as usize;
        let b = label_rng.gen_range(0..SIDE as u64) as usize;
        labels.push(SIDE * a + b);
        values.push(a as f64 / 10.0 + noise.sample(&mut signal_rng));
        values.push(b as f64 / 10.0 + noise.sample(&mut signal_rng));
        for _ in 0..d {
            values.push(background_rng.gen_range(0.0..2.0));
        }
    }

    let mut centroid_values = Vec::with_capacity(SIDE * SIDE * p);
    for a in 0..SIDE {
        for b in 0..SIDE {
            centroid_values.push(a as f64 / 10.0);
            centroid_values.push(b as f64 / 10.0);
            // uninformative columns sit at the Uniform(0,2) mean
            centroid_values.extend(std::iter::repeat(1.0).take(d));
        }
    }

    LabeledDataset {
        data: DataMatrix::new(N, p, values).expect("generated values are finite"),
        truth: Partition::new(labels, SIDE * SIDE).expect("labels in range"),
        relevant_features: vec![0, 1],
        true_centroids: Some(
            CentroidSet::new(SIDE * SIDE, p, centroid_values).expect("finite grid"),
        ),
    }
}

/// Sparse-support simulation: n = 100 k points in p = 100 dimensions.
/// Five features chosen at random carry Uniform(0,1) centroids; every other
/// feature is standard normal for all clusters.
pub fn gen_sim2(k: usize, seed: u64) -> Result<LabeledDataset> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "gen_sim2 needs k >= 2, got {k}"
        )));
    }
    const P: usize = 100;
    let mut rel_rng = stream_rng(seed, streams::RELEVANT_FEATURES);
    let mut relevant = sample_distinct(&mut rel_rng, P, 5);
    relevant.sort_unstable();
    Ok(mixture_dataset(100 * k, P, k, relevant, seed))
}

/// Feature-selection study: the sparse-support mechanism with n = 1000,
/// p = 20, k = 20, and the relevant features pinned to the first five.
pub fn gen_feature_sel(seed: u64) -> LabeledDataset {
    mixture_dataset(1000, 20, 20, vec![0, 1, 2, 3, 4], seed)
}

fn mixture_dataset(
    n: usize,
    p: usize,
    k: usize,
    relevant: Vec<usize>,
    seed: u64,
) -> LabeledDataset {
    let mut centroid_rng = stream_rng(seed, streams::CENTROIDS);
    let mut label_rng = stream_rng(seed, streams::LABELS);
    let mut signal_rng = stream_rng(seed, streams::SIGNAL_NOISE);
    let mut background_rng = stream_rng(seed, streams::BACKGROUND_NOISE);

    let mut centroids = vec![0.0; k * p];
    for j in 0..k {
        for &l in &relevant {
            centroids[j * p + l] = centroid_rng.gen_range(0.0..1.0);
        }
    }

    // Redraw the whole label vector until every cluster is hit, so the truth
    // always has exactly k clusters.
    let labels: Vec<usize> = loop {
        let draw: Vec<usize> = (0..n)
            .map(|_| label_rng.gen_range(0..k as u64) as usize)
            .collect();
        let mut seen = vec![false; k];
        for &l in &draw {
            seen[l] = true;
        }
        if seen.iter().all(|&s| s) {
            break draw;
        }
    };

    let is_relevant: Vec<bool> = {
        let mut mask = vec![false; p];
        for &l in &relevant {
            mask[l] = true;
        }
        mask
    };
    let signal = Normal::new(0.0, SIGNAL_SD).expect("valid sd");
    let background = Normal::new(0.0, 1.0).expect("valid sd");
    let mut values = Vec::with_capacity(n * p);
    for &label in &labels {
        for l in 0..p {
            if is_relevant[l] {
                values.push(centroids[label * p + l] + signal.sample(&mut signal_rng));
            } else {
                values.push(background.sample(&mut background_rng));
            }
        }
    }

    LabeledDataset {
        data: DataMatrix::new(n, p, values).expect("generated values are finite"),
        truth: Partition::new(labels, k).expect("labels in range"),
        relevant_features: relevant,
        true_centroids: Some(CentroidSet::new(k, p, centroids).expect("finite centroids")),
    }
}
