use clap::{Parser, Subcommand};
use ewp_cli::commands;

#[derive(Parser)]
#[command(name = "ewp", version, about = "Entropy weighted power k-means clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a numeric CSV and write labels, weights, centroids, and a run summary
    Cluster(commands::cluster::ClusterArgs),
    /// Generate a synthetic benchmark dataset with ground truth
    Generate(commands::generate::GenerateArgs),
    /// Print the normalized mutual information between two label files
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Run a replicated benchmark suite and write a report
    Benchmark(commands::benchmark::BenchmarkArgs),
    /// Grid-search the entropy weight lambda by cross-fold label stability
    TuneLambda(commands::tune::TuneLambdaArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(args) => commands::cluster::run(args),
        Command::Generate(args) => commands::generate::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Benchmark(args) => commands::benchmark::run(args),
        Command::TuneLambda(args) => commands::tune::run(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}
