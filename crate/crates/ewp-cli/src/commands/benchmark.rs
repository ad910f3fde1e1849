//! Replicated benchmark suites over the synthetic generators.
//!
//! Within a replicate every algorithm receives the same generated dataset
//! and the same initial centroids, so table differences reflect algorithms
//! rather than seeds. Each (scenario, replicate) pair derives its own seed,
//! replicates may run in parallel (`--jobs`), and report assembly is
//! sequential, so `report.json`/`report.csv` are byte-identical across runs
//! and parallelism levels; wall-clock data lands in `timing.json`.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Args;
use ewp_core::rng::replicate_seed;
use ewp_core::solver::sample_initial_centroids;
use ewp_core::{
    ewp_fit_with_init, gen_feature_sel, gen_sim1, gen_sim2, lloyd_fit_with_init, nmi,
    power_kmeans_fit_with_init, FitResult, LabeledDataset, SolverConfig,
};
use rayon::prelude::*;

use crate::commands::{Algorithm, CliError};
use crate::csvio::{self, format_float};
use crate::report::{
    mean, sample_sd, BenchmarkReport, FeatureWeightSummary, ReportCell, TimingCell, TimingReport,
};

/// Suite regularization strengths, chosen once by `tune-lambda` stability
/// search on held-out seeds and frozen so benchmark runs are deterministic.
pub const TABLE1_LAMBDA: f64 = 30.0;
pub const TABLE2_LAMBDA: f64 = 100.0;
pub const FEATSEL_LAMBDA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum BenchSuite {
    Table1,
    Table2,
    Featsel,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, value_enum)]
    pub suite: BenchSuite,
    #[arg(long, default_value_t = 20)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for report.json, report.csv, timing.json
    #[arg(long)]
    pub out: PathBuf,
    /// Include the large table2 scenarios (k = 200, 500); runtime grows as
    /// O(n k p) per iteration
    #[arg(long, default_value_t = false)]
    pub full: bool,
    /// Cap on parallel replicate jobs (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
}

struct Scenario {
    name: String,
    lambda: f64,
    k: usize,
    generate: Box<dyn Fn(u64) -> LabeledDataset + Sync>,
}

fn scenarios(suite: BenchSuite, full: bool) -> Vec<Scenario> {
    match suite {
        BenchSuite::Table1 => [5usize, 10, 20, 50, 100]
            .iter()
            .map(|&d| Scenario {
                name: format!("d={d}"),
                lambda: TABLE1_LAMBDA,
                k: 100,
                generate: Box::new(move |seed| gen_sim1(d, seed)),
            })
            .collect(),
        BenchSuite::Table2 => {
            let mut ks = vec![20usize, 100];
            if full {
                ks.extend([200, 500]);
            }
            ks.into_iter()
                .map(|k| Scenario {
                    name: format!("k={k}"),
                    lambda: TABLE2_LAMBDA,
                    k,
                    generate: Box::new(move |seed| {
                        gen_sim2(k, seed).expect("k >= 2 by construction")
                    }),
                })
                .collect()
        }
        BenchSuite::Featsel => vec![Scenario {
            name: "featsel".to_string(),
            lambda: FEATSEL_LAMBDA,
            k: 20,
            generate: Box::new(gen_feature_sel),
        }],
    }
}

fn suite_name(suite: BenchSuite) -> &'static str {
    match suite {
        BenchSuite::Table1 => "table1",
        BenchSuite::Table2 => "table2",
        BenchSuite::Featsel => "featsel",
    }
}

fn algorithms(suite: BenchSuite) -> Vec<Algorithm> {
    match suite {
        BenchSuite::Featsel => vec![Algorithm::Ewp],
        _ => vec![Algorithm::Ewp, Algorithm::Power, Algorithm::Lloyd],
    }
}

struct ReplicateOutcome {
    scenario: usize,
    // per algorithm, in suite order
    nmis: Vec<f64>,
    iterations: Vec<f64>,
    wall_ms: Vec<f64>,
    // EWP feature weights (featsel suite records them)
    weights: Vec<f64>,
}

fn run_replicate(
    scenario: &Scenario,
    scenario_idx: usize,
    algos: &[Algorithm],
    suite_seed: u64,
    replicate: u64,
) -> Result<ReplicateOutcome, CliError> {
    let scenario_seed = replicate_seed(suite_seed, 1_000_000 + scenario_idx as u64);
    let rep_seed = replicate_seed(scenario_seed, replicate);
    let dataset = (scenario.generate)(rep_seed);
    let config = SolverConfig::new(scenario.lambda).with_seed(rep_seed);
    let init = sample_initial_centroids(&dataset.data, scenario.k, rep_seed)?;

    let mut outcome = ReplicateOutcome {
        scenario: scenario_idx,
        nmis: Vec::with_capacity(algos.len()),
        iterations: Vec::with_capacity(algos.len()),
        wall_ms: Vec::with_capacity(algos.len()),
        weights: Vec::new(),
    };
    for &algo in algos {
        let start = Instant::now();
        let fit: FitResult = match algo {
            Algorithm::Ewp => ewp_fit_with_init(&dataset.data, init.clone(), &config)?,
            Algorithm::Power => power_kmeans_fit_with_init(&dataset.data, init.clone(), &config)?,
            Algorithm::Lloyd => lloyd_fit_with_init(&dataset.data, init.clone(), &config)?,
        };
        let wall = start.elapsed().as_secs_f64() * 1e3;
        let score = nmi(&fit.labels, &dataset.truth)?;
        outcome.nmis.push(score);
        outcome.iterations.push(fit.iterations as f64);
        outcome.wall_ms.push(wall);
        if algo == Algorithm::Ewp {
            outcome.weights = fit.weights.as_slice().to_vec();
        }
    }
    Ok(outcome)
}

pub fn run(args: BenchmarkArgs) -> Result<(), CliError> {
    if args.replicates == 0 {
        return Err(CliError::Input("--replicates must be >= 1".into()));
    }
    let scenario_list = scenarios(args.suite, args.full);
    let algos = algorithms(args.suite);

    let jobs: Vec<(usize, u64)> = (0..scenario_list.len())
        .flat_map(|si| (0..args.replicates as u64).map(move |r| (si, r)))
        .collect();

    let execute = || -> Result<Vec<ReplicateOutcome>, CliError> {
        jobs.par_iter()
            .map(|&(si, r)| run_replicate(&scenario_list[si], si, &algos, args.seed, r))
            .collect()
    };
    let outcomes = match args.jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Input(format!("cannot build --jobs pool: {e}")))?;
            pool.install(execute)?
        }
        None => execute()?,
    };

    // Sequential assembly in (scenario, algorithm) order.
    let mut cells = Vec::new();
    let mut timing_cells = Vec::new();
    for (si, scenario) in scenario_list.iter().enumerate() {
        for (ai, &algo) in algos.iter().enumerate() {
            let nmis: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.scenario == si)
                .map(|o| o.nmis[ai])
                .collect();
            let iters: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.scenario == si)
                .map(|o| o.iterations[ai])
                .collect();
            let walls: Vec<f64> = outcomes
                .iter()
                .filter(|o| o.scenario == si)
                .map(|o| o.wall_ms[ai])
                .collect();
            let m = mean(&nmis);
            cells.push(ReportCell {
                scenario: scenario.name.clone(),
                algorithm: algo.name().to_string(),
                lambda: scenario.lambda,
                replicates: nmis.len(),
                mean_nmi: m,
                sd_nmi: sample_sd(&nmis, m),
                mean_iterations: mean(&iters),
            });
            timing_cells.push(TimingCell {
                scenario: scenario.name.clone(),
                algorithm: algo.name().to_string(),
                wall_ms_mean: mean(&walls),
                wall_ms_min: walls.iter().cloned().fold(f64::INFINITY, f64::min),
                wall_ms_max: walls.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            });
        }
    }

    fs::create_dir_all(&args.out)?;

    let feature_weight_summary = if args.suite == BenchSuite::Featsel {
        let relevant: Vec<usize> = (0..5).collect();
        let sums: Vec<f64> = outcomes
            .iter()
            .map(|o| relevant.iter().map(|&l| o.weights[l]).sum())
            .collect();
        csvio::write_matrix_rows(
            &args.out.join("featsel_weights.csv"),
            outcomes.iter().map(|o| o.weights.as_slice()),
        )?;
        let m = mean(&sums);
        Some(FeatureWeightSummary {
            relevant_features: relevant,
            mean_relevant_weight_sum: m,
            min_relevant_weight_sum: sums.iter().cloned().fold(f64::INFINITY, f64::min),
            replicates_with_sum_at_least_090: sums.iter().filter(|&&s| s >= 0.90).count(),
        })
    } else {
        None
    };

    let report = BenchmarkReport {
        artifact_version: env!("CARGO_PKG_VERSION"),
        suite: suite_name(args.suite).to_string(),
        seed: args.seed,
        replicates: args.replicates,
        full: args.full,
        cells,
        feature_weight_summary,
    };
    fs::write(
        args.out.join("report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;

    let mut csv_out = std::io::BufWriter::new(fs::File::create(args.out.join("report.csv"))?);
    writeln!(
        csv_out,
        "scenario,algorithm,lambda,replicates,mean_nmi,sd_nmi,mean_iterations"
    )?;
    for c in &report.cells {
        writeln!(
            csv_out,
            "{},{},{},{},{},{},{}",
            c.scenario,
            c.algorithm,
            format_float(c.lambda),
            c.replicates,
            format_float(c.mean_nmi),
            format_float(c.sd_nmi),
            format_float(c.mean_iterations)
        )?;
    }
    csv_out.flush()?;

    let timing = TimingReport {
        unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        cells: timing_cells,
    };
    fs::write(
        args.out.join("timing.json"),
        serde_json::to_string_pretty(&timing)?,
    )?;

    for c in &report.cells {
        println!(
            "{} {} mean_nmi={:.4} sd={:.4} (n={})",
            c.scenario, c.algorithm, c.mean_nmi, c.sd_nmi, c.replicates
        );
    }
    Ok(())
}
