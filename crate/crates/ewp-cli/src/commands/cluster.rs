use std::fs;
use std::path::PathBuf;

use clap::Args;
use ewp_core::{ewp_fit, lloyd_fit, power_kmeans_fit, FitResult, SolverConfig};

use crate::commands::{Algorithm, CliError};
use crate::csvio;
use crate::report::{ConfigEcho, RunSummary};

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Numeric CSV to cluster (optional header row auto-detected)
    #[arg(long)]
    pub input: PathBuf,
    /// Number of clusters
    #[arg(long)]
    pub k: usize,
    /// Entropy regularization strength
    #[arg(long)]
    pub lambda: f64,
    /// Initial power of the annealing schedule
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub s0: f64,
    /// Annealing rate (s <- eta * s each iteration)
    #[arg(long, default_value_t = 1.05)]
    pub eta: f64,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for labels.csv, weights.csv, centroids.csv, summary.json
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "ewp")]
    pub algorithm: Algorithm,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    /// Convergence tolerance on parameter movement
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

pub fn run(args: ClusterArgs) -> Result<(), CliError> {
    let x = csvio::read_matrix(&args.input)?;
    let config = SolverConfig {
        lambda: args.lambda,
        s0: args.s0,
        eta: args.eta,
        max_iter: args.max_iter,
        conv_tol: args.tol,
        seed: args.seed,
        ..SolverConfig::new(args.lambda)
    };
    let fit = run_algorithm(args.algorithm, &x, args.k, &config)?;

    let final_objective = *fit
        .objective_trace
        .last()
        .ok_or_else(|| CliError::Numerical("empty objective trace".into()))?;
    if !final_objective.is_finite() {
        return Err(CliError::Numerical(format!(
            "objective is not finite: {final_objective}"
        )));
    }

    fs::create_dir_all(&args.out_dir)?;
    csvio::write_labels(&args.out_dir.join("labels.csv"), fit.labels.labels())?;
    csvio::write_weights(&args.out_dir.join("weights.csv"), fit.weights.as_slice())?;
    csvio::write_matrix_rows(
        &args.out_dir.join("centroids.csv"),
        (0..fit.centroids.k()).map(|j| fit.centroids.row(j)),
    )?;

    let summary = RunSummary {
        artifact_version: env!("CARGO_PKG_VERSION"),
        algorithm: args.algorithm.name().to_string(),
        input: args.input.display().to_string(),
        n: x.n_rows(),
        p: x.n_cols(),
        k: args.k,
        config: ConfigEcho::from(&config),
        iterations: fit.iterations,
        converged: fit.converged,
        final_objective,
        s_at_exit: fit.s_trace.last().copied(),
    };
    fs::write(
        args.out_dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!(
        "wrote {} (algorithm={}, iterations={}, converged={})",
        args.out_dir.display(),
        args.algorithm.name(),
        fit.iterations,
        fit.converged
    );
    Ok(())
}

pub fn run_algorithm(
    algorithm: Algorithm,
    x: &ewp_core::DataMatrix,
    k: usize,
    config: &SolverConfig,
) -> Result<FitResult, CliError> {
    let fit = match algorithm {
        Algorithm::Ewp => ewp_fit(x, k, config)?,
        Algorithm::Power => power_kmeans_fit(x, k, config)?,
        Algorithm::Lloyd => lloyd_fit(x, k, config)?,
    };
    Ok(fit)
}
