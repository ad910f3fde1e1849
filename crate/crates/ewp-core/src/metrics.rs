//! Partition evaluation: normalized mutual information and the k-means
//! objective.
//!
//! NMI uses natural logs and the sqrt(H(a) H(b)) normalization, with the
//! conventions 0 log 0 = 0, NMI = 1 when both partitions are single-cluster,
//! and NMI = 0 when exactly one is.

use crate::error::{Error, Result};
use crate::types::{CentroidSet, DataMatrix, Partition};

/// Joint label counts with marginals; the substrate for mutual information.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_marginals: Vec<u64>,
    col_marginals: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn from_partitions(a: &Partition, b: &Partition) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidArgument(format!(
                "partition lengths differ: {} vs {}",
                a.len(),
                b.len()
            )));
        }
        let (rows, cols) = (a.k(), b.k());
        let mut counts = vec![0u64; rows * cols];
        for (&la, &lb) in a.labels().iter().zip(b.labels()) {
            counts[la * cols + lb] += 1;
        }
        let mut row_marginals = vec![0u64; rows];
        let mut col_marginals = vec![0u64; cols];
        for i in 0..rows {
            for j in 0..cols {
                row_marginals[i] += counts[i * cols + j];
                col_marginals[j] += counts[i * cols + j];
            }
        }
        Ok(Self {
            rows,
            cols,
            counts,
            row_marginals,
            col_marginals,
            total: a.len() as u64,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    pub fn row_marginal(&self, i: usize) -> u64 {
        self.row_marginals[i]
    }

    pub fn col_marginal(&self, j: usize) -> u64 {
        self.col_marginals[j]
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

fn entropy(marginals: &[u64], n: f64) -> f64 {
    marginals
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// True when every nonzero cell is the only one in both its row and its
/// column, i.e. the partitions agree up to relabeling and NMI is exactly 1.
fn is_relabeling(t: &ContingencyTable) -> bool {
    for i in 0..t.rows() {
        let nonzero = (0..t.cols()).filter(|&j| t.count(i, j) > 0).count();
        if nonzero > 1 {
            return false;
        }
    }
    for j in 0..t.cols() {
        let nonzero = (0..t.rows()).filter(|&i| t.count(i, j) > 0).count();
        if nonzero > 1 {
            return false;
        }
    }
    true
}

/// Normalized mutual information in [0, 1], invariant to relabeling.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    let t = ContingencyTable::from_partitions(a, b)?;
    let n = t.total() as f64;
    let ha = entropy(&t.row_marginals, n);
    let hb = entropy(&t.col_marginals, n);
    match (ha == 0.0, hb == 0.0) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    if is_relabeling(&t) {
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            let c = t.count(i, j);
            if c == 0 {
                continue;
            }
            let p = c as f64 / n;
            let ratio = (c as f64 * n) / (t.row_marginal(i) as f64 * t.col_marginal(j) as f64);
            mi += p * ratio.ln();
        }
    }
    // exact value lies in [0, 1]; trim floating-point wobble
    Ok((mi / (ha * hb).sqrt()).clamp(0.0, 1.0))
}

/// The k-means objective: sum over points of the squared Euclidean distance
/// to the nearest centroid.
pub fn kmeans_objective(x: &DataMatrix, theta: &CentroidSet) -> Result<f64> {
    if theta.n_cols() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            context: "centroid columns vs data columns",
            expected: x.n_cols(),
            actual: theta.n_cols(),
        });
    }
    let mut total = 0.0;
    for i in 0..x.n_rows() {
        let xr = x.row(i);
        let mut best = f64::INFINITY;
        for j in 0..theta.k() {
            let tr = theta.row(j);
            let mut d = 0.0;
            for l in 0..xr.len() {
                let diff = xr[l] - tr[l];
                d += diff * diff;
            }
            best = best.min(d);
        }
        total += best;
    }
    Ok(total)
}
