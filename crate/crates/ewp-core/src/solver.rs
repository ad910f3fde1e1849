//! The annealed MM loop: majorizer weights from the power-mean gradient,
//! closed-form centroid and entropy-softmax weight updates, and the
//! objective sum_i M_s(weighted sq. distances) + lambda * sum_l w_l log w_l.
//!
//! One iteration, starting from (Theta_m, w_m, s_m):
//!   1. phi_ij  = d M_s / d y_j at y_i = clamped weighted sq. distances of x_i
//!   2. Theta_{m+1}, j = sum_i phi_ij x_i / sum_i phi_ij
//!   3. w_{m+1}  = softmax(-D_l / lambda), D_l = sum_ij phi_ij (x_il - theta_jl)^2
//!      evaluated at Theta_{m+1} (the exact joint surrogate minimizer:
//!      the optimal Theta does not depend on w, so updating w against the
//!      fresh centroids still minimizes the same surrogate)
//!   4. s_{m+1}  = max(eta * s_m, s_floor)
//!
//! Row-level work is distributed over fixed-size chunks and partial results
//! are merged in chunk order, so results are bitwise identical regardless
//! of thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::power_mean::{power_mean_gradient_into, power_mean_raw};
use rand::Rng as _;

use crate::rng::{stream_rng, streams};
use crate::types::{
    weighted_sq_dist_raw, CentroidSet, DataMatrix, FeatureWeights, FitResult, Partition,
    SolverConfig,
};

/// Rows per parallel work unit. Fixed so that chunked reductions are
/// independent of the number of worker threads.
const ROW_CHUNK: usize = 1024;

/// A majorizer column whose mass falls below this is treated as empty and
/// its centroid reseeded.
pub const EMPTY_COLUMN_FLOOR: f64 = 1e-300;

/// Clamp applied by the library-level `objective` helper.
pub const DEFAULT_DIST_FLOOR: f64 = 1e-12;

/// The n x k matrix of surrogate coefficients phi_ij: row i is the gradient
/// of M_s at the vector of clamped weighted squared distances from x_i to
/// every centroid.
#[derive(Debug, Clone)]
pub struct MajorizerWeights {
    n: usize,
    k: usize,
    values: Vec<f64>,
}

impl MajorizerWeights {
    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k + j]
    }

    /// Builds from explicit rows; mainly for tests exercising the centroid
    /// and weight updates with hand-picked coefficients.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no majorizer rows".into()));
        }
        let k = rows[0].len();
        for r in &rows {
            if r.len() != k {
                return Err(Error::DimensionMismatch {
                    context: "MajorizerWeights::from_rows",
                    expected: k,
                    actual: r.len(),
                });
            }
        }
        Ok(Self {
            n,
            k,
            values: rows.into_iter().flatten().collect(),
        })
    }
}

fn check_dims(x: &DataMatrix, theta: &CentroidSet, w: &FeatureWeights) -> Result<()> {
    if theta.n_cols() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "centroid columns vs data columns",
            expected: x.n_cols(),
            actual: theta.n_cols(),
        });
    }
    if w.len() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "weight length vs data columns",
            expected: x.n_cols(),
            actual: w.len(),
        });
    }
    Ok(())
}

/// Fills `dists` (clamped weighted squared distances, n x k) and `phi`
/// (majorizer rows), returning sum_i M_s(dists row i). Deterministic
/// chunked reduction.
fn dists_and_phi(
    x: &DataMatrix,
    theta: &CentroidSet,
    w: &[f64],
    s: f64,
    floor: f64,
    dists: &mut [f64],
    phi: &mut [f64],
) -> f64 {
    let k = theta.k();
    let parts: Vec<f64> = dists
        .par_chunks_mut(ROW_CHUNK * k)
        .zip(phi.par_chunks_mut(ROW_CHUNK * k))
        .enumerate()
        .map(|(ci, (dchunk, pchunk))| {
            let row0 = ci * ROW_CHUNK;
            let rows = dchunk.len() / k;
            let mut local = 0.0;
            for r in 0..rows {
                let xr = x.row(row0 + r);
                let drow = &mut dchunk[r * k..(r + 1) * k];
                for (j, d) in drow.iter_mut().enumerate() {
                    *d = weighted_sq_dist_raw(xr, theta.row(j), w).max(floor);
                }
                local += power_mean_raw(drow, s);
                power_mean_gradient_into(drow, s, &mut pchunk[r * k..(r + 1) * k]);
            }
            local
        })
        .collect();
    parts.iter().sum()
}

/// phi-weighted sums of the data rows plus the phi column sums:
/// returns (k x p accumulator, k column sums).
fn centroid_sums(x: &DataMatrix, phi: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let p = x.n_cols();
    let partials: Vec<(Vec<f64>, Vec<f64>)> = phi
        .par_chunks(ROW_CHUNK * k)
        .enumerate()
        .map(|(ci, pchunk)| {
            let row0 = ci * ROW_CHUNK;
            let rows = pchunk.len() / k;
            let mut acc = vec![0.0; k * p];
            let mut col = vec![0.0; k];
            for r in 0..rows {
                let xr = x.row(row0 + r);
                for j in 0..k {
                    let f = pchunk[r * k + j];
                    col[j] += f;
                    let dst = &mut acc[j * p..(j + 1) * p];
                    for (a, xv) in dst.iter_mut().zip(xr) {
                        *a += f * xv;
                    }
                }
            }
            (acc, col)
        })
        .collect();
    let p_total = k * p;
    let mut acc = vec![0.0; p_total];
    let mut col = vec![0.0; k];
    for (a, c) in partials {
        for (dst, v) in acc.iter_mut().zip(&a) {
            *dst += v;
        }
        for (dst, v) in col.iter_mut().zip(&c) {
            *dst += v;
        }
    }
    (acc, col)
}

/// Per-feature majorized costs D_l = sum_ij phi_ij (x_il - theta_jl)^2.
fn feature_costs(x: &DataMatrix, theta: &CentroidSet, phi: &[f64]) -> Vec<f64> {
    let k = theta.k();
    let p = x.n_cols();
    let partials: Vec<Vec<f64>> = phi
        .par_chunks(ROW_CHUNK * k)
        .enumerate()
        .map(|(ci, pchunk)| {
            let row0 = ci * ROW_CHUNK;
            let rows = pchunk.len() / k;
            let mut d = vec![0.0; p];
            for r in 0..rows {
                let xr = x.row(row0 + r);
                for j in 0..k {
                    let f = pchunk[r * k + j];
                    let tr = theta.row(j);
                    for l in 0..p {
                        let diff = xr[l] - tr[l];
                        d[l] += f * diff * diff;
                    }
                }
            }
            d
        })
        .collect();
    let mut d = vec![0.0; p];
    for part in partials {
        for (dst, v) in d.iter_mut().zip(&part) {
            *dst += v;
        }
    }
    d
}

/// lambda-free negative entropy sum_l w_l log w_l with 0 log 0 = 0.
fn neg_entropy(w: &[f64]) -> f64 {
    w.iter().map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 }).sum()
}

/// Majorizer coefficients at (Theta, w, s): row i is the power-mean gradient
/// at the clamped squared distances of x_i. Entries are nonnegative and
/// finite; at strongly negative s far-off entries underflow to zero, which
/// the centroid update reports as an empty column.
pub fn majorizer_weights(
    x: &DataMatrix,
    theta: &CentroidSet,
    w: &FeatureWeights,
    s: f64,
    dist_floor: f64,
) -> Result<MajorizerWeights> {
    check_dims(x, theta, w)?;
    if !s.is_finite() || s == 0.0 || s > 1.0 {
        return Err(Error::Domain(format!(
            "power must be finite, nonzero, and <= 1, got {s}"
        )));
    }
    if !(dist_floor > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dist_floor must be positive, got {dist_floor}"
        )));
    }
    let (n, k) = (x.n_rows(), theta.k());
    let mut dists = vec![0.0; n * k];
    let mut phi = vec![0.0; n * k];
    dists_and_phi(x, theta, w.as_slice(), s, dist_floor, &mut dists, &mut phi);
    Ok(MajorizerWeights { n, k, values: phi })
}

/// Closed-form centroid update: theta_j = sum_i phi_ij x_i / sum_i phi_ij.
/// Each coordinate is a convex combination of data values; the result is
/// clamped to the column bounds to keep the hull property exact under
/// floating-point rounding.
pub fn update_centroids(x: &DataMatrix, phi: &MajorizerWeights) -> Result<CentroidSet> {
    if phi.n_rows() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "majorizer rows vs data rows",
            expected: x.n_rows(),
            actual: phi.n_rows(),
        });
    }
    let bounds = x.column_bounds();
    centroids_from_sums(x, &phi.values, phi.k(), &bounds)
}

fn centroids_from_sums(
    x: &DataMatrix,
    phi: &[f64],
    k: usize,
    bounds: &[(f64, f64)],
) -> Result<CentroidSet> {
    let p = x.n_cols();
    let (mut acc, col) = centroid_sums(x, phi, k);
    for (j, &c) in col.iter().enumerate() {
        if !(c >= EMPTY_COLUMN_FLOOR) {
            return Err(Error::EmptyCluster { cluster: j });
        }
        for (l, v) in acc[j * p..(j + 1) * p].iter_mut().enumerate() {
            *v = (*v / c).clamp(bounds[l].0, bounds[l].1);
        }
    }
    CentroidSet::new(k, p, acc)
}

/// Entropy-softmax weight update: w_l proportional to exp(-D_l / lambda),
/// computed stably by subtracting min_l D_l before exponentiation.
pub fn update_weights(
    x: &DataMatrix,
    theta: &CentroidSet,
    phi: &MajorizerWeights,
    lambda: f64,
) -> Result<FeatureWeights> {
    if phi.n_rows() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "majorizer rows vs data rows",
            expected: x.n_rows(),
            actual: phi.n_rows(),
        });
    }
    if theta.n_cols() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "centroid columns vs data columns",
            expected: x.n_cols(),
            actual: theta.n_cols(),
        });
    }
    if theta.k() != phi.k() {
        return Err(Error::DimensionMismatch {
            context: "centroid count vs majorizer columns",
            expected: phi.k(),
            actual: theta.k(),
        });
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let d = feature_costs(x, theta, &phi.values);
    Ok(softmax_weights(&d, lambda))
}

fn softmax_weights(costs: &[f64], lambda: f64) -> FeatureWeights {
    let lo = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut e: Vec<f64> = costs.iter().map(|&d| (-(d - lo) / lambda).exp()).collect();
    let total: f64 = e.iter().sum();
    for v in e.iter_mut() {
        *v /= total;
    }
    FeatureWeights::new(e).expect("softmax output is on the simplex")
}

/// The full objective f_s(Theta, w) = sum_i M_s(...) + lambda sum_l w_l log w_l,
/// with squared distances clamped below by `DEFAULT_DIST_FLOOR` and the
/// convention 0 log 0 = 0. The entropy term lies in [-lambda log p, 0].
pub fn objective(
    x: &DataMatrix,
    theta: &CentroidSet,
    w: &FeatureWeights,
    s: f64,
    lambda: f64,
) -> Result<f64> {
    check_dims(x, theta, w)?;
    if !s.is_finite() || s == 0.0 || s > 1.0 {
        return Err(Error::Domain(format!(
            "power must be finite, nonzero, and <= 1, got {s}"
        )));
    }
    Ok(distance_objective(x, theta, w.as_slice(), s, DEFAULT_DIST_FLOOR)
        + lambda * neg_entropy(w.as_slice()))
}

fn distance_objective(x: &DataMatrix, theta: &CentroidSet, w: &[f64], s: f64, floor: f64) -> f64 {
    let k = theta.k();
    let n = x.n_rows();
    let parts: Vec<f64> = (0..n.div_ceil(ROW_CHUNK))
        .into_par_iter()
        .map(|ci| {
            let row0 = ci * ROW_CHUNK;
            let rows = ROW_CHUNK.min(n - row0);
            let mut buf = vec![0.0; k];
            let mut local = 0.0;
            for r in 0..rows {
                let xr = x.row(row0 + r);
                for (j, d) in buf.iter_mut().enumerate() {
                    *d = weighted_sq_dist_raw(xr, theta.row(j), w).max(floor);
                }
                local += power_mean_raw(&buf, s);
            }
            local
        })
        .collect();
    parts.iter().sum()
}

/// Nearest-centroid labels under the weighted distance; ties break to the
/// lowest index.
pub fn assign(x: &DataMatrix, theta: &CentroidSet, w: &FeatureWeights) -> Result<Partition> {
    check_dims(x, theta, w)?;
    Ok(assign_raw(x, theta, w.as_slice()))
}

fn assign_raw(x: &DataMatrix, theta: &CentroidSet, w: &[f64]) -> Partition {
    let k = theta.k();
    let mut labels = vec![0usize; x.n_rows()];
    labels
        .par_chunks_mut(ROW_CHUNK)
        .enumerate()
        .for_each(|(ci, chunk)| {
            let row0 = ci * ROW_CHUNK;
            for (r, slot) in chunk.iter_mut().enumerate() {
                let xr = x.row(row0 + r);
                let mut best = f64::INFINITY;
                let mut arg = 0;
                for j in 0..k {
                    let d = weighted_sq_dist_raw(xr, theta.row(j), w);
                    if d < best {
                        best = d;
                        arg = j;
                    }
                }
                *slot = arg;
            }
        });
    Partition::new(labels, k).expect("labels are in range by construction")
}

/// The shared initialization: k distinct data rows sampled without
/// replacement from stream 0 of `seed`. Every fit in this crate starts
/// here, so handing the same seed to different algorithms hands them the
/// same initial centroids.
///
/// Distinct means distinct row values: coincident centroids receive
/// identical updates forever and would silently waste a cluster. When the
/// data holds fewer than k unique rows the remaining slots reuse rows in
/// shuffled order.
pub fn sample_initial_centroids(x: &DataMatrix, k: usize, seed: u64) -> Result<CentroidSet> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let n = x.n_rows();
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the number of observations n = {n}"
        )));
    }
    let mut rng = stream_rng(seed, streams::SOLVER_INIT);
    let mut idx: Vec<usize> = (0..n).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    let mut walked = 0;
    for i in 0..n {
        let j = rng.gen_range(i as u64..n as u64) as usize;
        idx.swap(i, j);
        walked = i + 1;
        let cand = idx[i];
        if chosen.iter().all(|&c| x.row(c) != x.row(cand)) {
            chosen.push(cand);
            if chosen.len() == k {
                break;
            }
        }
    }
    // fewer unique rows than k: reuse skipped rows in shuffled order
    if chosen.len() < k {
        let skipped: Vec<usize> = idx[..walked]
            .iter()
            .copied()
            .filter(|i| !chosen.contains(i))
            .collect();
        chosen.extend(skipped.into_iter().take(k - chosen.len()));
    }
    CentroidSet::from_rows(chosen.iter().map(|&i| x.row(i).to_vec()).collect())
}

/// One step's report: the objective at the state the step started from
/// (computed from the same distances that produced phi) and the largest
/// parameter movement.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub objective: f64,
    pub max_delta: f64,
}

/// Drives the annealed MM loop one iteration at a time, exposing the
/// intermediate state; `ewp_fit` and `power_kmeans_fit` are thin loops over
/// this. Borrowed data, owned parameters.
pub struct EwpStepper<'a> {
    x: &'a DataMatrix,
    config: SolverConfig,
    bounds: Vec<(f64, f64)>,
    theta: CentroidSet,
    weights: FeatureWeights,
    s: f64,
    iteration: usize,
    frozen_weights: bool,
    dists: Vec<f64>,
    phi: Vec<f64>,
}

impl<'a> EwpStepper<'a> {
    /// Initializes centroids at k distinct data rows sampled without
    /// replacement from stream 0 of `config.seed`, and weights at uniform.
    pub fn new(x: &'a DataMatrix, k: usize, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let theta = sample_initial_centroids(x, k, config.seed)?;
        Self::with_init(x, theta, config)
    }

    /// Starts from explicit initial centroids (used by tests and by the
    /// benchmark harness to hand every algorithm the same start).
    pub fn with_init(x: &'a DataMatrix, init: CentroidSet, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        if init.n_cols() != x.n_cols() {
            return Err(Error::DimensionMismatch {
                context: "initial centroid columns vs data columns",
                expected: x.n_cols(),
                actual: init.n_cols(),
            });
        }
        if init.k() > x.n_rows() {
            return Err(Error::InvalidArgument(format!(
                "k = {} exceeds the number of observations n = {}",
                init.k(),
                x.n_rows()
            )));
        }
        let n = x.n_rows();
        let k = init.k();
        Ok(Self {
            x,
            bounds: x.column_bounds(),
            theta: init,
            weights: FeatureWeights::uniform(x.n_cols()),
            s: config.s0,
            iteration: 0,
            frozen_weights: false,
            dists: vec![0.0; n * k],
            phi: vec![0.0; n * k],
            config: config.clone(),
        })
    }

    /// Pins the weights at uniform, which turns the loop into power k-means
    /// (and drops the entropy term from reported objectives).
    pub fn freeze_weights(mut self) -> Self {
        self.frozen_weights = true;
        self
    }

    pub fn centroids(&self) -> &CentroidSet {
        &self.theta
    }

    pub fn weights(&self) -> &FeatureWeights {
        &self.weights
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// f at the current state: entropy included unless weights are frozen.
    pub fn objective(&self) -> f64 {
        let dist = distance_objective(
            self.x,
            &self.theta,
            self.weights.as_slice(),
            self.s,
            self.config.dist_floor,
        );
        if self.frozen_weights {
            dist
        } else {
            dist + self.config.lambda * neg_entropy(self.weights.as_slice())
        }
    }

    pub fn assign(&self) -> Partition {
        assign_raw(self.x, &self.theta, self.weights.as_slice())
    }

    fn refresh_majorizer(&mut self) -> f64 {
        dists_and_phi(
            self.x,
            &self.theta,
            self.weights.as_slice(),
            self.s,
            self.config.dist_floor,
            &mut self.dists,
            &mut self.phi,
        )
    }

    /// Index of the observation farthest (weighted) from its nearest
    /// centroid, per the current distance matrix.
    fn farthest_row(&self) -> usize {
        let k = self.theta.k();
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for i in 0..self.x.n_rows() {
            let row = &self.dists[i * k..(i + 1) * k];
            let near = row.iter().cloned().fold(f64::INFINITY, f64::min);
            if near > best {
                best = near;
                arg = i;
            }
        }
        arg
    }

    /// Runs one MM sweep plus the annealing step. Returns the objective at
    /// the state the sweep started from and the parameter movement.
    pub fn step(&mut self) -> Result<StepOutcome> {
        let k = self.theta.k();
        let p = self.x.n_cols();
        let dist_part = self.refresh_majorizer();
        let objective = if self.frozen_weights {
            dist_part
        } else {
            dist_part + self.config.lambda * neg_entropy(self.weights.as_slice())
        };

        // Centroid update, reseeding any cluster whose majorizer column
        // underflowed at the farthest point from its nearest centroid.
        let theta_next = {
            let mut attempts = 0;
            loop {
                match centroids_from_sums(self.x, &self.phi, k, &self.bounds) {
                    Ok(t) => break t,
                    Err(Error::EmptyCluster { cluster }) => {
                        if attempts >= k {
                            return Err(Error::EmptyCluster { cluster });
                        }
                        attempts += 1;
                        let far = self.farthest_row();
                        self.theta.set_row(cluster, self.x.row(far));
                        self.refresh_majorizer();
                    }
                    Err(e) => return Err(e),
                }
            }
        };

        let weights_next = if self.frozen_weights {
            self.weights.clone()
        } else {
            let costs = feature_costs(self.x, &theta_next, &self.phi);
            softmax_weights(&costs, self.config.lambda)
        };

        let mut max_delta = 0.0f64;
        for (a, b) in self.theta.values().iter().zip(theta_next.values()) {
            max_delta = max_delta.max((a - b).abs());
        }
        for l in 0..p {
            max_delta = max_delta.max((self.weights.get(l) - weights_next.get(l)).abs());
        }

        self.theta = theta_next;
        self.weights = weights_next;
        self.s = (self.config.eta * self.s).max(self.config.s_floor);
        self.iteration += 1;

        Ok(StepOutcome {
            objective,
            max_delta,
        })
    }
}

fn run_annealed(mut stepper: EwpStepper<'_>) -> Result<FitResult> {
    let max_iter = stepper.config.max_iter;
    let conv_tol = stepper.config.conv_tol;
    let mut objective_trace = Vec::with_capacity(max_iter + 1);
    let mut s_trace = Vec::with_capacity(max_iter + 1);
    let mut converged = false;
    loop {
        s_trace.push(stepper.s());
        let out = stepper.step()?;
        objective_trace.push(out.objective);
        if out.max_delta < conv_tol {
            converged = true;
            break;
        }
        if stepper.iteration() >= max_iter {
            break;
        }
    }
    s_trace.push(stepper.s());
    objective_trace.push(stepper.objective());
    let labels = stepper.assign();
    Ok(FitResult {
        iterations: stepper.iteration(),
        converged,
        labels,
        centroids: stepper.theta,
        weights: stepper.weights,
        objective_trace,
        s_trace,
    })
}

/// Entropy weighted power k-means: the full annealed fit.
pub fn ewp_fit(x: &DataMatrix, k: usize, config: &SolverConfig) -> Result<FitResult> {
    run_annealed(EwpStepper::new(x, k, config)?)
}

/// As `ewp_fit` but starting from the given centroids.
pub fn ewp_fit_with_init(
    x: &DataMatrix,
    init: CentroidSet,
    config: &SolverConfig,
) -> Result<FitResult> {
    run_annealed(EwpStepper::with_init(x, init, config)?)
}

pub(crate) fn power_fit_with_stepper(stepper: EwpStepper<'_>) -> Result<FitResult> {
    run_annealed(stepper.freeze_weights())
}
