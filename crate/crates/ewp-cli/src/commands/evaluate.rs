use std::path::PathBuf;

use clap::Args;
use ewp_core::{nmi, Partition};

use crate::commands::CliError;
use crate::csvio;

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// First label file (one label per row)
    #[arg(long)]
    pub a: PathBuf,
    /// Second label file
    #[arg(long)]
    pub b: PathBuf,
}

pub fn run(args: EvaluateArgs) -> Result<(), CliError> {
    let a = csvio::read_labels(&args.a)?;
    let b = csvio::read_labels(&args.b)?;
    if a.len() != b.len() {
        return Err(CliError::Input(format!(
            "label files differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let ka = a.iter().max().map_or(1, |m| m + 1);
    let kb = b.iter().max().map_or(1, |m| m + 1);
    let pa = Partition::new(a, ka)?;
    let pb = Partition::new(b, kb)?;
    let value = nmi(&pa, &pb)?;
    println!("{value:.4}");
    Ok(())
}
