use std::fs;
use std::path::PathBuf;

use clap::Args;
use ewp_core::{gen_feature_sel, gen_sim1, gen_sim2, LabeledDataset};
use serde::Serialize;

use crate::commands::CliError;
use crate::csvio;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Sim1,
    Sim2,
    Featsel,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Number of uninformative features (sim1 only)
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of clusters (sim2 only)
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for data.csv, truth.csv, metadata.json
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Metadata {
    suite: String,
    seed: u64,
    n: usize,
    p: usize,
    k: usize,
    relevant_features: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_centroids: Option<Vec<Vec<f64>>>,
}

pub fn run(args: GenerateArgs) -> Result<(), CliError> {
    let dataset = build_dataset(&args)?;
    write_dataset(&args.out, suite_name(args.suite), args.seed, &dataset)
}

fn suite_name(suite: Suite) -> &'static str {
    match suite {
        Suite::Sim1 => "sim1",
        Suite::Sim2 => "sim2",
        Suite::Featsel => "featsel",
    }
}

pub fn build_dataset(args: &GenerateArgs) -> Result<LabeledDataset, CliError> {
    match args.suite {
        Suite::Sim1 => {
            if args.k.is_some() {
                return Err(CliError::Input("--k is not valid for suite sim1".into()));
            }
            let d = args
                .d
                .ok_or_else(|| CliError::Input("suite sim1 requires --d".into()))?;
            Ok(gen_sim1(d, args.seed))
        }
        Suite::Sim2 => {
            if args.d.is_some() {
                return Err(CliError::Input("--d is not valid for suite sim2".into()));
            }
            let k = args
                .k
                .ok_or_else(|| CliError::Input("suite sim2 requires --k".into()))?;
            Ok(gen_sim2(k, args.seed)?)
        }
        Suite::Featsel => {
            if args.d.is_some() || args.k.is_some() {
                return Err(CliError::Input(
                    "suite featsel takes no --d or --k".into(),
                ));
            }
            Ok(gen_feature_sel(args.seed))
        }
    }
}

pub fn write_dataset(
    out: &PathBuf,
    suite: &str,
    seed: u64,
    dataset: &LabeledDataset,
) -> Result<(), CliError> {
    fs::create_dir_all(out)?;
    csvio::write_matrix_rows(
        &out.join("data.csv"),
        (0..dataset.data.n_rows()).map(|i| dataset.data.row(i)),
    )?;
    csvio::write_labels(&out.join("truth.csv"), dataset.truth.labels())?;
    let metadata = Metadata {
        suite: suite.to_string(),
        seed,
        n: dataset.data.n_rows(),
        p: dataset.data.n_cols(),
        k: dataset.truth.k(),
        relevant_features: dataset.relevant_features.clone(),
        true_centroids: dataset
            .true_centroids
            .as_ref()
            .map(|t| (0..t.k()).map(|j| t.row(j).to_vec()).collect()),
    };
    fs::write(
        out.join("metadata.json"),
        serde_json::to_string_pretty(&metadata)?,
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
