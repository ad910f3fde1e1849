//! Lloyd's k-means and power k-means baselines.
//!
//! Power k-means is the annealed loop with the feature weights pinned at
//! uniform (the entropy-optimal point), so its reduction properties are
//! shared code rather than a parallel implementation. Lloyd is the classic
//! assign/average alternation on the squared Euclidean objective.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{power_fit_with_stepper, sample_initial_centroids, EwpStepper};
use crate::types::{CentroidSet, DataMatrix, FeatureWeights, FitResult, Partition, SolverConfig};

const ROW_CHUNK: usize = 1024;

/// Power k-means: anneals the power-mean objective over unweighted
/// (uniform-weight) distances. Same initialization, tie-break, repair, and
/// termination style as `ewp_fit`; the trace carries no entropy term.
pub fn power_kmeans_fit(x: &DataMatrix, k: usize, config: &SolverConfig) -> Result<FitResult> {
    power_fit_with_stepper(EwpStepper::new(x, k, config)?)
}

/// As `power_kmeans_fit` but starting from the given centroids.
pub fn power_kmeans_fit_with_init(
    x: &DataMatrix,
    init: CentroidSet,
    config: &SolverConfig,
) -> Result<FitResult> {
    power_fit_with_stepper(EwpStepper::with_init(x, init, config)?)
}

/// Lloyd's algorithm on the squared Euclidean objective. Initializes at k
/// distinct data rows from stream 0 of the seed (identical to the other
/// fits), stops when labels are unchanged between sweeps, and records the
/// k-means objective per sweep.
pub fn lloyd_fit(x: &DataMatrix, k: usize, config: &SolverConfig) -> Result<FitResult> {
    config.validate()?;
    lloyd_fit_with_init(x, sample_initial_centroids(x, k, config.seed)?, config)
}

pub fn lloyd_fit_with_init(
    x: &DataMatrix,
    init: CentroidSet,
    config: &SolverConfig,
) -> Result<FitResult> {
    config.validate()?;
    if init.n_cols() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "initial centroid columns vs data columns",
            expected: x.n_cols(),
            actual: init.n_cols(),
        });
    }
    let k = init.k();
    if k > x.n_rows() {
        return Err(Error::InvalidArgument(format!(
            "k = {} exceeds the number of observations n = {}",
            k,
            x.n_rows()
        )));
    }
    let bounds = x.column_bounds();
    let mut theta = init;
    let mut objective_trace = Vec::with_capacity(config.max_iter + 1);
    let (mut labels, mut min_dists, obj) = euclidean_sweep(x, &theta);
    objective_trace.push(obj);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iter {
        theta = cluster_means(x, &labels, &theta, &min_dists, &bounds);
        iterations += 1;
        let (next_labels, next_dists, obj) = euclidean_sweep(x, &theta);
        objective_trace.push(obj);
        let stable = next_labels == labels;
        labels = next_labels;
        min_dists = next_dists;
        if stable {
            converged = true;
            break;
        }
    }
    Ok(FitResult {
        labels: Partition::new(labels, k).expect("labels in range by construction"),
        centroids: theta,
        weights: FeatureWeights::uniform(x.n_cols()),
        objective_trace,
        s_trace: Vec::new(),
        iterations,
        converged,
    })
}

/// One assignment pass: nearest centroid per row (ties to the lowest index),
/// the per-row minimum squared distance, and their sum (the Eq.-style
/// k-means objective). Deterministic chunked reduction.
fn euclidean_sweep(x: &DataMatrix, theta: &CentroidSet) -> (Vec<usize>, Vec<f64>, f64) {
    let n = x.n_rows();
    let k = theta.k();
    let mut labels = vec![0usize; n];
    let mut dists = vec![0.0f64; n];
    let parts: Vec<f64> = labels
        .par_chunks_mut(ROW_CHUNK)
        .zip(dists.par_chunks_mut(ROW_CHUNK))
        .enumerate()
        .map(|(ci, (lchunk, dchunk))| {
            let row0 = ci * ROW_CHUNK;
            let mut local = 0.0;
            for (r, (slot, dslot)) in lchunk.iter_mut().zip(dchunk.iter_mut()).enumerate() {
                let xr = x.row(row0 + r);
                let mut best = f64::INFINITY;
                let mut arg = 0usize;
                for j in 0..k {
                    let tr = theta.row(j);
                    let mut d = 0.0;
                    for l in 0..xr.len() {
                        let diff = xr[l] - tr[l];
                        d += diff * diff;
                    }
                    if d < best {
                        best = d;
                        arg = j;
                    }
                }
                *slot = arg;
                *dslot = best;
                local += best;
            }
            local
        })
        .collect();
    (labels, dists, parts.iter().sum())
}

/// Per-cluster means; an empty cluster is reseeded at the point farthest
/// from its nearest centroid (distinct points across repairs in a sweep).
fn cluster_means(
    x: &DataMatrix,
    labels: &[usize],
    prev: &CentroidSet,
    min_dists: &[f64],
    bounds: &[(f64, f64)],
) -> CentroidSet {
    let k = prev.k();
    let p = x.n_cols();
    let partials: Vec<(Vec<f64>, Vec<u64>)> = labels
        .par_chunks(ROW_CHUNK)
        .enumerate()
        .map(|(ci, lchunk)| {
            let row0 = ci * ROW_CHUNK;
            let mut acc = vec![0.0; k * p];
            let mut counts = vec![0u64; k];
            for (r, &j) in lchunk.iter().enumerate() {
                counts[j] += 1;
                let xr = x.row(row0 + r);
                for (a, v) in acc[j * p..(j + 1) * p].iter_mut().zip(xr) {
                    *a += v;
                }
            }
            (acc, counts)
        })
        .collect();
    let mut acc = vec![0.0; k * p];
    let mut counts = vec![0u64; k];
    for (a, c) in partials {
        for (dst, v) in acc.iter_mut().zip(&a) {
            *dst += v;
        }
        for (dst, v) in counts.iter_mut().zip(&c) {
            *dst += v;
        }
    }
    let mut used = Vec::new();
    let mut rows = Vec::with_capacity(k);
    for j in 0..k {
        if counts[j] == 0 {
            let far = farthest_unused(min_dists, &used);
            used.push(far);
            rows.push(x.row(far).to_vec());
        } else {
            let c = counts[j] as f64;
            let row: Vec<f64> = acc[j * p..(j + 1) * p]
                .iter()
                .enumerate()
                .map(|(l, v)| (v / c).clamp(bounds[l].0, bounds[l].1))
                .collect();
            rows.push(row);
        }
    }
    CentroidSet::from_rows(rows).expect("means are finite")
}

fn farthest_unused(min_dists: &[f64], used: &[usize]) -> usize {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, &d) in min_dists.iter().enumerate() {
        if d > best && !used.contains(&i) {
            best = d;
            arg = i;
        }
    }
    arg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::kmeans_objective;

    #[test]
    fn lloyd_distinct_points_reach_zero_objective() {
        let x = DataMatrix::from_rows(vec![vec![0.0], vec![5.0], vec![9.0]]).unwrap();
        let fit = lloyd_fit(&x, 3, &SolverConfig::new(1.0).with_seed(2)).unwrap();
        assert!(fit.converged);
        assert!(fit.objective_trace.last().unwrap().abs() < 1e-24);
        let mut got: Vec<f64> = (0..3).map(|j| fit.centroids.get(j, 0)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, vec![0.0, 5.0, 9.0]);
    }

    #[test]
    fn lloyd_two_cluster_hand_instance() {
        // Exhaustive oracle over all 2-partitions of (0, 0.1, 10, 10.1):
        // the best split is {0, 0.1}/{10, 10.1} with centroids
        // (0.05, 10.05) and objective 0.01.
        let pts = [0.0, 0.1, 10.0, 10.1];
        let mut best = (f64::INFINITY, 0u32);
        for mask in 1u32..15 {
            let (mut sa, mut na, mut sb, mut nb) = (0.0, 0, 0.0, 0);
            for (i, &v) in pts.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    sa += v;
                    na += 1;
                } else {
                    sb += v;
                    nb += 1;
                }
            }
            let (ma, mb) = (sa / na as f64, sb / nb as f64);
            let mut obj = 0.0;
            for (i, &v) in pts.iter().enumerate() {
                let m = if mask & (1 << i) != 0 { ma } else { mb };
                obj += (v - m) * (v - m);
            }
            if obj < best.0 {
                best = (obj, mask);
            }
        }
        assert!((best.0 - 0.01).abs() < 1e-12);

        let x = DataMatrix::from_rows(pts.iter().map(|&v| vec![v]).collect()).unwrap();
        let init = CentroidSet::from_rows(vec![vec![0.0], vec![10.0]]).unwrap();
        let fit = lloyd_fit_with_init(&x, init, &SolverConfig::new(1.0)).unwrap();
        let mut got: Vec<f64> = (0..2).map(|j| fit.centroids.get(j, 0)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((got[0] - 0.05).abs() < 1e-12);
        assert!((got[1] - 10.05).abs() < 1e-12);
        let obj = fit.objective_trace.last().unwrap();
        assert!((obj - 0.01).abs() < 1e-12, "{obj}");
    }

    #[test]
    fn lloyd_deterministic_under_seed() {
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 7) as f64, (i % 3) as f64 * 2.0])
            .collect();
        let x = DataMatrix::from_rows(rows).unwrap();
        let cfg = SolverConfig::new(1.0).with_seed(99);
        let a = lloyd_fit(&x, 4, &cfg).unwrap();
        let b = lloyd_fit(&x, 4, &cfg).unwrap();
        assert_eq!(a.labels.labels(), b.labels.labels());
        assert_eq!(a.objective_trace, b.objective_trace);
    }

    #[test]
    fn lloyd_trace_non_increasing_and_matches_objective_metric() {
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let f = i as f64;
                vec![(f * 0.37).sin() * 3.0, (f * 0.71).cos() * 2.0]
            })
            .collect();
        let x = DataMatrix::from_rows(rows).unwrap();
        let fit = lloyd_fit(&x, 5, &SolverConfig::new(1.0).with_seed(1)).unwrap();
        for w in fit.objective_trace.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-300, "{:?}", w);
        }
        let last = *fit.objective_trace.last().unwrap();
        let recomputed = kmeans_objective(&x, &fit.centroids).unwrap();
        assert!((last - recomputed).abs() <= 1e-12 * recomputed.max(1.0));
    }

    #[test]
    fn lloyd_rejects_k_above_n() {
        let x = DataMatrix::from_rows(vec![vec![0.0]]).unwrap();
        assert!(lloyd_fit(&x, 2, &SolverConfig::new(1.0)).is_err());
    }

    #[test]
    fn power_kmeans_single_cluster_is_global_mean() {
        let x = DataMatrix::from_rows(vec![vec![0.0, 2.0], vec![4.0, 6.0], vec![2.0, 1.0]])
            .unwrap();
        let fit = power_kmeans_fit(&x, 1, &SolverConfig::new(1.0).with_seed(1)).unwrap();
        assert!((fit.centroids.get(0, 0) - 2.0).abs() < 1e-9);
        assert!((fit.centroids.get(0, 1) - 3.0).abs() < 1e-9);
        // weights stay exactly uniform
        assert_eq!(fit.weights.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn power_kmeans_single_fixed_s_step_is_khm_update() {
        // At s = -1 one majorize/average sweep is the k-harmonic-means MM
        // step: phi_ij = (1/k) y_ij^{-2} / ((1/k) sum_j y_ij^{-1})^2.
        let x = DataMatrix::from_rows(vec![vec![0.0], vec![2.0], vec![3.0]]).unwrap();
        let init = CentroidSet::from_rows(vec![vec![0.5], vec![2.5]]).unwrap();
        let cfg = SolverConfig {
            s_floor: -1.0,
            max_iter: 1,
            ..SolverConfig::new(1.0)
        };
        let mut stepper = EwpStepper::with_init(&x, init.clone(), &cfg)
            .unwrap()
            .freeze_weights();
        stepper.step().unwrap();

        // direct evaluation of the s = -1 formula (weighted dists carry the
        // uniform 1/p factor, which cancels in phi by zero-homogeneity)
        let k = 2;
        let mut num = vec![0.0; k];
        let mut den = vec![0.0; k];
        for i in 0..3 {
            let xi = x.get(i, 0);
            let y: Vec<f64> = (0..k)
                .map(|j| ((xi - init.get(j, 0)).powi(2)).max(1e-12))
                .collect();
            let a: f64 = y.iter().map(|v| 1.0 / v).sum::<f64>() / k as f64;
            for j in 0..k {
                let phi = (1.0 / k as f64) * y[j].powi(-2) / (a * a);
                num[j] += phi * xi;
                den[j] += phi;
            }
        }
        for j in 0..k {
            let expect = num[j] / den[j];
            let got = stepper.centroids().get(j, 0);
            assert!((got - expect).abs() < 1e-10, "j={j}: {got} vs {expect}");
        }
    }
}
