//! Lambda selection by cross-fold label stability.
//!
//! For each candidate lambda and each fold: fit on the fold's complement,
//! label the held-out rows with the fitted centroids and weights, fit on
//! the held-out rows directly, and score the agreement (NMI) of the two
//! held-out labelings. The lambda with the highest mean stability wins;
//! ties go to the smaller lambda.

use std::path::PathBuf;

use clap::Args;
use ewp_core::rng::{replicate_seed, sample_distinct, stream_rng};
use ewp_core::{assign, ewp_fit, nmi, DataMatrix, SolverConfig};

use crate::commands::CliError;
use crate::csvio::{self, format_float};

/// RNG stream (of the user seed) used to shuffle rows into folds.
const FOLD_STREAM: u64 = 6;

#[derive(Debug, Args)]
pub struct TuneLambdaArgs {
    /// Numeric CSV to tune on
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Comma-separated candidate lambdas
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 2)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run(args: TuneLambdaArgs) -> Result<(), CliError> {
    let outcome = tune(&args)?;
    println!("lambda,mean_stability");
    for (lambda, stability) in &outcome.table {
        println!("{},{}", format_float(*lambda), format_float(*stability));
    }
    println!("chosen_lambda,{}", format_float(outcome.chosen));
    Ok(())
}

pub struct TuneOutcome {
    pub table: Vec<(f64, f64)>,
    pub chosen: f64,
}

pub fn tune(args: &TuneLambdaArgs) -> Result<TuneOutcome, CliError> {
    if args.grid.is_empty() {
        return Err(CliError::Input("--grid must be non-empty".into()));
    }
    if args.folds < 2 {
        return Err(CliError::Input("--folds must be >= 2".into()));
    }
    for &g in &args.grid {
        if !(g > 0.0 && g.is_finite()) {
            return Err(CliError::Input(format!("grid lambda must be positive: {g}")));
        }
    }
    let x = csvio::read_matrix(&args.input)?;
    let folds = split_folds(x.n_rows(), args.folds, args.seed);
    for f in &folds {
        if f.len() < args.k {
            return Err(CliError::Input(format!(
                "fold size {} is below k = {}",
                f.len(),
                args.k
            )));
        }
    }

    let mut grid = args.grid.clone();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();

    let mut table = Vec::with_capacity(grid.len());
    for (gi, &lambda) in grid.iter().enumerate() {
        let mut scores = Vec::with_capacity(args.folds);
        for (fi, fold) in folds.iter().enumerate() {
            let holdout = submatrix(&x, fold);
            let complement_rows: Vec<usize> = (0..x.n_rows())
                .filter(|i| !fold.contains(i))
                .collect();
            let complement = submatrix(&x, &complement_rows);
            let fit_seed = replicate_seed(args.seed, (gi * args.folds + fi) as u64);
            let config = SolverConfig::new(lambda).with_seed(fit_seed);

            let trained = ewp_fit(&complement, args.k, &config)?;
            let labels_transfer = assign(&holdout, &trained.centroids, &trained.weights)?;
            let direct = ewp_fit(&holdout, args.k, &config)?;
            scores.push(nmi(&labels_transfer, &direct.labels)?);
        }
        table.push((lambda, scores.iter().sum::<f64>() / scores.len() as f64));
    }

    // highest stability wins; ascending grid order makes ties pick the
    // smaller lambda
    let mut chosen = table[0];
    for &entry in &table[1..] {
        if entry.1 > chosen.1 {
            chosen = entry;
        }
    }
    Ok(TuneOutcome {
        table,
        chosen: chosen.0,
    })
}

/// Shuffles row indices and deals them round-robin into `folds` groups.
fn split_folds(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = stream_rng(seed, FOLD_STREAM);
    let idx = sample_distinct(&mut rng, n, n);
    let mut out = vec![Vec::with_capacity(n / folds + 1); folds];
    for (pos, row) in idx.into_iter().enumerate() {
        out[pos % folds].push(row);
    }
    out
}

fn submatrix(x: &DataMatrix, rows: &[usize]) -> DataMatrix {
    let mut values = Vec::with_capacity(rows.len() * x.n_cols());
    for &i in rows {
        values.extend_from_slice(x.row(i));
    }
    DataMatrix::new(rows.len(), x.n_cols(), values).expect("rows of a valid matrix")
}
