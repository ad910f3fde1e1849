//! Report structures written by `cluster` and `benchmark`.
//!
//! `report.json` and `report.csv` are fully determined by the inputs and
//! seed; everything volatile (wall-clock measurements, timestamp) goes to
//! the separate `timing.json`, so repeated runs produce byte-identical
//! reports. JSON schemas for the deterministic files ship under `schemas/`.

use serde::Serialize;

use ewp_core::SolverConfig;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub lambda: f64,
    pub s0: f64,
    pub eta: f64,
    pub s_floor: f64,
    pub max_iter: usize,
    pub conv_tol: f64,
    pub dist_floor: f64,
    pub seed: u64,
}

impl From<&SolverConfig> for ConfigEcho {
    fn from(c: &SolverConfig) -> Self {
        Self {
            lambda: c.lambda,
            s0: c.s0,
            eta: c.eta,
            s_floor: c.s_floor,
            max_iter: c.max_iter,
            conv_tol: c.conv_tol,
            dist_floor: c.dist_floor,
            seed: c.seed,
        }
    }
}

/// Summary of a single `cluster` run.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub artifact_version: &'static str,
    pub algorithm: String,
    pub input: String,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub config: ConfigEcho,
    pub iterations: usize,
    pub converged: bool,
    pub final_objective: f64,
    pub s_at_exit: Option<f64>,
}

/// One (scenario, algorithm) cell of a benchmark table.
#[derive(Debug, Clone, Serialize)]
pub struct ReportCell {
    pub scenario: String,
    pub algorithm: String,
    pub lambda: f64,
    pub replicates: usize,
    pub mean_nmi: f64,
    pub sd_nmi: f64,
    pub mean_iterations: f64,
}

/// Extra summary emitted by the feature-selection suite.
#[derive(Debug, Clone, Serialize)]
pub struct FeatureWeightSummary {
    pub relevant_features: Vec<usize>,
    pub mean_relevant_weight_sum: f64,
    pub min_relevant_weight_sum: f64,
    pub replicates_with_sum_at_least_090: usize,
}

#[derive(Debug, Serialize)]
pub struct BenchmarkReport {
    pub artifact_version: &'static str,
    pub suite: String,
    pub seed: u64,
    pub replicates: usize,
    pub full: bool,
    pub cells: Vec<ReportCell>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feature_weight_summary: Option<FeatureWeightSummary>,
}

/// Volatile side file: wall-clock stats per cell plus the run timestamp.
#[derive(Debug, Serialize)]
pub struct TimingReport {
    pub unix_seconds: u64,
    pub cells: Vec<TimingCell>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TimingCell {
    pub scenario: String,
    pub algorithm: String,
    pub wall_ms_mean: f64,
    pub wall_ms_min: f64,
    pub wall_ms_max: f64,
}

pub fn sample_sd(values: &[f64], mean: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        / (values.len() - 1) as f64;
    var.sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
