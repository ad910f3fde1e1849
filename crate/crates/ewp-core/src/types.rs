//! Shared data model: matrices, weights, partitions, solver configuration,
//! and the weighted squared distance primitive.
//!
//! All types are immutable values once constructed and safe to share across
//! threads; the operations here are pure functions.

use crate::error::{Error, Result};

/// An n x p matrix of observations, row-major. Every entry is finite and
/// n >= 1, p >= 1; this is the immutable input to every fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "data matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "DataMatrix::new",
                expected: rows * cols,
                actual: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / cols,
                    col: i % cols,
                });
            }
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no rows".into()));
        }
        let p = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != p {
                return Err(Error::DimensionMismatch {
                    context: "DataMatrix::from_rows",
                    expected: p,
                    actual: rows[i].len(),
                });
            }
        }
        Self::new(n, p, rows.into_iter().flatten().collect())
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Per-column (min, max) over all rows.
    pub fn column_bounds(&self) -> Vec<(f64, f64)> {
        let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); self.cols];
        for i in 0..self.rows {
            for (b, v) in bounds.iter_mut().zip(self.row(i)) {
                b.0 = b.0.min(*v);
                b.1 = b.1.max(*v);
            }
        }
        bounds
    }
}

/// A k x p matrix whose rows are cluster centers; the primary output of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidSet {
    k: usize,
    cols: usize,
    values: Vec<f64>,
}

impl CentroidSet {
    pub fn new(k: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if k == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "centroid set must be at least 1x1, got {k}x{cols}"
            )));
        }
        if values.len() != k * cols {
            return Err(Error::DimensionMismatch {
                context: "CentroidSet::new",
                expected: k * cols,
                actual: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: i / cols,
                    col: i % cols,
                });
            }
        }
        Ok(Self { k, cols, values })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidArgument("no centroid rows".into()));
        }
        let p = rows[0].len();
        for r in &rows {
            if r.len() != p {
                return Err(Error::DimensionMismatch {
                    context: "CentroidSet::from_rows",
                    expected: p,
                    actual: r.len(),
                });
            }
        }
        Self::new(k, p, rows.into_iter().flatten().collect())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.cols..(j + 1) * self.cols]
    }

    pub fn get(&self, j: usize, l: usize) -> f64 {
        self.values[j * self.cols + l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn set_row(&mut self, j: usize, row: &[f64]) {
        self.values[j * self.cols..(j + 1) * self.cols].copy_from_slice(row);
    }
}

/// Tolerance on the simplex-sum invariant of `FeatureWeights`. The softmax
/// update is exact only up to floating point, so exactness is not enforced.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A p-vector on the probability simplex: learned feature relevance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights {
    values: Vec<f64>,
}

impl FeatureWeights {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty weight vector".into()));
        }
        let mut sum = 0.0;
        for (l, w) in values.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { row: 0, col: l });
            }
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "weight {l} is negative: {w}"
                )));
            }
            sum += w;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {sum}, not 1 within {SIMPLEX_TOL}"
            )));
        }
        Ok(Self { values })
    }

    /// The entropy-optimal start: w_l = 1/p for every feature.
    pub fn uniform(p: usize) -> Self {
        Self {
            values: vec![1.0 / p as f64; p],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, l: usize) -> f64 {
        self.values[l]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Cluster labels for n observations, each in [0, k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument("empty partition".into()));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("partition needs k >= 1".into()));
        }
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::InvalidArgument(format!(
                "label {l} at index {i} out of range [0, {k})"
            )));
        }
        Ok(Self { labels, k })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Every knob of the annealed MM loop. `lambda` scales the entropy penalty;
/// `s0`, `eta`, `s_floor` drive the annealing schedule s <- max(eta*s, s_floor).
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Entropy regularization strength; > 0.
    pub lambda: f64,
    /// Initial power; < 0.
    pub s0: f64,
    /// Annealing rate; > 1.
    pub eta: f64,
    /// Most negative power visited; <= s0. Beyond -100 the power mean is
    /// numerically the min, so annealing further only harms conditioning.
    pub s_floor: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Convergence threshold on the max of the centroid and weight
    /// infinity-norm deltas between consecutive iterations.
    pub conv_tol: f64,
    /// Squared distances are clamped below by this before any power
    /// operation; y = 0 with s < 0 is undefined.
    pub dist_floor: f64,
    /// Seed for the portable RNG (see `rng`).
    pub seed: u64,
}

impl SolverConfig {
    pub fn new(lambda: f64) -> Self {
        Self {
            lambda,
            s0: -1.0,
            eta: 1.05,
            s_floor: -100.0,
            max_iter: 500,
            conv_tol: 1e-6,
            dist_floor: 1e-12,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.s0 < 0.0 && self.s0.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "s0 must be negative, got {}",
                self.s0
            )));
        }
        if !(self.eta > 1.0 && self.eta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "eta must exceed 1, got {}",
                self.eta
            )));
        }
        if !(self.s_floor <= self.s0 && self.s_floor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "s_floor must be <= s0, got {} vs {}",
                self.s_floor, self.s0
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be >= 1".into()));
        }
        if !(self.conv_tol > 0.0 && self.conv_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "conv_tol must be positive, got {}",
                self.conv_tol
            )));
        }
        if !(self.dist_floor > 0.0 && self.dist_floor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dist_floor must be positive, got {}",
                self.dist_floor
            )));
        }
        Ok(())
    }
}

/// Output of a fit: final parameters, labels, and per-iteration traces.
/// `objective_trace[m]` is the objective at the state entering iteration m
/// (so its length is `iterations + 1`), and is non-increasing within
/// relative slack 1e-9.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub centroids: CentroidSet,
    pub weights: FeatureWeights,
    pub labels: Partition,
    pub objective_trace: Vec<f64>,
    pub s_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted squared distance sum_l w_l (x_l - theta_l)^2.
pub fn weighted_sq_dist(x: &[f64], theta: &[f64], w: &FeatureWeights) -> Result<f64> {
    if x.len() != w.len() {
        return Err(Error::DimensionMismatch {
            context: "weighted_sq_dist (x vs w)",
            expected: w.len(),
            actual: x.len(),
        });
    }
    if theta.len() != w.len() {
        return Err(Error::DimensionMismatch {
            context: "weighted_sq_dist (theta vs w)",
            expected: w.len(),
            actual: theta.len(),
        });
    }
    Ok(weighted_sq_dist_raw(x, theta, w.as_slice()))
}

#[inline]
pub(crate) fn weighted_sq_dist_raw(x: &[f64], theta: &[f64], w: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), theta.len());
    debug_assert_eq!(x.len(), w.len());
    let mut acc = 0.0;
    for l in 0..x.len() {
        let d = x[l] - theta[l];
        acc += w[l] * d * d;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn data_matrix_rejects_non_finite() {
        let err = DataMatrix::new(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 1, col: 0 }));
        let err = DataMatrix::new(1, 2, vec![f64::INFINITY, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonFinite { row: 0, col: 0 }));
    }

    #[test]
    fn data_matrix_rejects_empty_and_ragged() {
        assert!(DataMatrix::new(0, 3, vec![]).is_err());
        assert!(DataMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DataMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn column_bounds_cover_rows() {
        let x = DataMatrix::from_rows(vec![vec![0.0, 5.0], vec![-1.0, 2.0], vec![3.0, 4.0]])
            .unwrap();
        assert_eq!(x.column_bounds(), vec![(-1.0, 3.0), (2.0, 5.0)]);
    }

    #[test]
    fn feature_weights_enforce_simplex() {
        assert!(FeatureWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(FeatureWeights::new(vec![0.5, 0.6]).is_err());
        assert!(FeatureWeights::new(vec![-0.1, 1.1]).is_err());
        let u = FeatureWeights::uniform(4);
        assert_eq!(u.as_slice(), &[0.25; 4]);
    }

    #[test]
    fn partition_rejects_out_of_range() {
        assert!(Partition::new(vec![0, 1, 2], 3).is_ok());
        assert!(Partition::new(vec![0, 3], 3).is_err());
        assert!(Partition::new(vec![], 3).is_err());
    }

    #[test]
    fn solver_config_validation() {
        assert!(SolverConfig::new(1.0).validate().is_ok());
        assert!(SolverConfig { lambda: 0.0, ..SolverConfig::new(1.0) }.validate().is_err());
        assert!(SolverConfig { s0: 0.5, ..SolverConfig::new(1.0) }.validate().is_err());
        assert!(SolverConfig { eta: 1.0, ..SolverConfig::new(1.0) }.validate().is_err());
        assert!(SolverConfig { s_floor: -0.5, ..SolverConfig::new(1.0) }.validate().is_err());
        assert!(SolverConfig { max_iter: 0, ..SolverConfig::new(1.0) }.validate().is_err());
    }

    // s_floor == s0 is valid: it pins s for fixed-power runs.
    #[test]
    fn solver_config_allows_pinned_s() {
        let cfg = SolverConfig { s_floor: -1.0, ..SolverConfig::new(1.0) };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn weighted_dist_zero_when_equal() {
        let w = FeatureWeights::uniform(3);
        let x = [1.0, -2.0, 0.5];
        assert_eq!(weighted_sq_dist(&x, &x, &w).unwrap(), 0.0);
    }

    #[test]
    fn weighted_dist_single_active_coordinate() {
        let w = FeatureWeights::new(vec![1.0, 0.0]).unwrap();
        let d = weighted_sq_dist(&[1.0, 0.0], &[0.0, 0.0], &w).unwrap();
        assert_eq!(d, 1.0);
    }

    // 0.25 * 1 + 0.75 * 4 = 3.25
    #[test]
    fn weighted_dist_hand_value() {
        let w = FeatureWeights::new(vec![0.25, 0.75]).unwrap();
        let d = weighted_sq_dist(&[1.0, 2.0], &[0.0, 0.0], &w).unwrap();
        assert!((d - 3.25).abs() < 1e-15);
    }

    #[test]
    fn weighted_dist_dimension_mismatch() {
        let w = FeatureWeights::uniform(2);
        assert!(weighted_sq_dist(&[1.0, 2.0, 3.0], &[0.0, 0.0, 0.0], &w).is_err());
        assert!(weighted_sq_dist(&[1.0, 2.0], &[0.0], &w).is_err());
    }

    proptest! {
        // With uniform weights, p * weighted distance equals the squared
        // Euclidean distance.
        #[test]
        fn uniform_weights_recover_euclidean(
            xs in proptest::collection::vec(-50.0f64..50.0, 1..8),
            ts in proptest::collection::vec(-50.0f64..50.0, 1..8),
        ) {
            let p = xs.len().min(ts.len());
            let (xs, ts) = (&xs[..p], &ts[..p]);
            let w = FeatureWeights::uniform(p);
            let wd = weighted_sq_dist(xs, ts, &w).unwrap();
            let eu: f64 = xs.iter().zip(ts).map(|(a, b)| (a - b) * (a - b)).sum();
            prop_assert!((p as f64 * wd - eu).abs() <= 1e-12 * eu.max(1e-300));
        }

        // Linearity in w for fixed x, theta.
        #[test]
        fn linear_in_weights(
            xs in proptest::collection::vec(-10.0f64..10.0, 3),
            ts in proptest::collection::vec(-10.0f64..10.0, 3),
            alpha in 0.0f64..1.0,
        ) {
            let w1 = FeatureWeights::new(vec![0.7, 0.2, 0.1]).unwrap();
            let w2 = FeatureWeights::new(vec![0.1, 0.3, 0.6]).unwrap();
            let mix: Vec<f64> = w1.as_slice().iter().zip(w2.as_slice())
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
            let wm = FeatureWeights::new(mix).unwrap();
            let lhs = weighted_sq_dist(&xs, &ts, &wm).unwrap();
            let rhs = alpha * weighted_sq_dist(&xs, &ts, &w1).unwrap()
                + (1.0 - alpha) * weighted_sq_dist(&xs, &ts, &w2).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }

        // Zero distance iff coordinates agree wherever the weight is positive.
        #[test]
        fn zero_iff_equal_on_support(
            x0 in -5.0f64..5.0,
            t0 in -5.0f64..5.0,
            delta in 0.001f64..10.0,
        ) {
            let w = FeatureWeights::new(vec![0.0, 1.0]).unwrap();
            // differs only on the zero-weight coordinate
            let d = weighted_sq_dist(&[x0, 3.0], &[t0, 3.0], &w).unwrap();
            prop_assert_eq!(d, 0.0);
            // differs on the supported coordinate
            let d = weighted_sq_dist(&[x0, 3.0 + delta], &[t0, 3.0], &w).unwrap();
            prop_assert!(d > 0.0);
        }
    }
}
