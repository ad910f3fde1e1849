//! End-to-end tests of the `ewp` binary: command behavior, file formats,
//! exit codes, and determinism of the report files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ewp_core::{ewp_fit, gen_sim2, nmi, Partition, SolverConfig};

fn ewp_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ewp"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = ewp_bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn run_expect_code(args: &[&str], code: i32) -> String {
    let out = ewp_bin().args(args).output().expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(code),
        "command {:?}: stderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_labels(path: &Path) -> Vec<usize> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.trim().parse().unwrap())
        .collect()
}

fn write_csv(dir: &Path, name: &str, content: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, content).unwrap();
    p
}

#[test]
fn cluster_groups_repeated_rows() {
    let dir = tempfile::tempdir().unwrap();
    // 3 distinct rows, each repeated 4 times
    let mut content = String::new();
    for rep in 0..4 {
        let _ = rep;
        content.push_str("0.0,0.0\n9.0,1.0\n4.0,8.0\n");
    }
    let input = write_csv(dir.path(), "x.csv", &content);
    let out_dir = dir.path().join("out");
    run_ok(&[
        "cluster",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "3",
        "--lambda",
        "1.0",
        "--seed",
        "2",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let labels = read_labels(&out_dir.join("labels.csv"));
    assert_eq!(labels.len(), 12);
    for group in 0..3 {
        let first = labels[group];
        for rep in 1..4 {
            assert_eq!(labels[rep * 3 + group], first, "group {group} split");
        }
    }
    // distinct groups get distinct labels
    assert_ne!(labels[0], labels[1]);
    assert_ne!(labels[1], labels[2]);

    // summary validates against the shipped schema
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let schema: serde_json::Value = serde_json::from_str(include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/run_summary.schema.json"
    )))
    .unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    assert!(
        compiled.validate(&summary).is_ok(),
        "summary violates schema: {summary}"
    );
}

#[test]
fn power_algorithm_writes_exactly_uniform_weights() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(
        dir.path(),
        "x.csv",
        "0.0,1.0,2.0,3.0\n5.0,1.0,2.0,3.0\n0.1,1.1,2.1,3.1\n5.1,1.1,2.1,3.1\n",
    );
    let out_dir = dir.path().join("out");
    run_ok(&[
        "cluster",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--lambda",
        "1.0",
        "--algorithm",
        "power",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let weights = fs::read_to_string(out_dir.join("weights.csv")).unwrap();
    let quarter = format!("{:.16e}", 0.25f64);
    for (l, line) in weights.lines().enumerate() {
        assert_eq!(line, format!("{l},{quarter}"));
    }
}

// Generated data written to CSV, re-read, and clustered must reproduce the
// in-memory run exactly: the 17-digit serialization is lossless and the
// solver is deterministic.
#[test]
fn csv_round_trip_reproduces_in_memory_fit_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let gen_dir = dir.path().join("gen");
    run_ok(&[
        "generate", "--suite", "sim2", "--k", "20", "--seed", "7", "--out",
        gen_dir.to_str().unwrap(),
    ]);
    let out_dir = dir.path().join("out");
    run_ok(&[
        "cluster",
        "--input",
        gen_dir.join("data.csv").to_str().unwrap(),
        "--k",
        "20",
        "--lambda",
        "100.0",
        "--seed",
        "42",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let cli_labels = read_labels(&out_dir.join("labels.csv"));

    let dataset = gen_sim2(20, 7).unwrap();
    let config = SolverConfig::new(100.0).with_seed(42);
    let fit = ewp_fit(&dataset.data, 20, &config).unwrap();
    assert_eq!(cli_labels, fit.labels.labels());

    let truth = read_labels(&gen_dir.join("truth.csv"));
    let cli_nmi = nmi(
        &Partition::new(cli_labels, 20).unwrap(),
        &Partition::new(truth, 20).unwrap(),
    )
    .unwrap();
    let mem_nmi = nmi(&fit.labels, &dataset.truth).unwrap();
    assert_eq!(cli_nmi.to_bits(), mem_nmi.to_bits());
}

#[test]
fn generate_shapes_match_suites() {
    let dir = tempfile::tempdir().unwrap();
    let sim1 = dir.path().join("sim1");
    run_ok(&[
        "generate", "--suite", "sim1", "--d", "5", "--seed", "1", "--out",
        sim1.to_str().unwrap(),
    ]);
    let data = fs::read_to_string(sim1.join("data.csv")).unwrap();
    let lines: Vec<&str> = data.lines().collect();
    assert_eq!(lines.len(), 1000);
    assert_eq!(lines[0].split(',').count(), 7);

    let featsel = dir.path().join("featsel");
    run_ok(&[
        "generate", "--suite", "featsel", "--seed", "3", "--out",
        featsel.to_str().unwrap(),
    ]);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(featsel.join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["relevant_features"], serde_json::json!([0, 1, 2, 3, 4]));
    assert_eq!(meta["n"], 1000);
    assert_eq!(meta["p"], 20);
    assert_eq!(meta["k"], 20);
}

#[test]
fn evaluate_self_and_permuted_labels_score_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_csv(dir.path(), "a.csv", "0\n0\n1\n1\n2\n2\n");
    let b = write_csv(dir.path(), "b.csv", "2\n2\n0\n0\n1\n1\n");
    let out = run_ok(&["evaluate", "--a", a.to_str().unwrap(), "--b", a.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.0000");
    let out = run_ok(&["evaluate", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1.0000");
}

// Monte-Carlo oracle: two independent balanced labelings of n = 10000 have
// NMI near zero (the 0.01 bound is generous at this n).
#[test]
fn evaluate_independent_labels_near_zero() {
    use ewp_core::rng::stream_rng;
    use rand::Rng;
    let dir = tempfile::tempdir().unwrap();
    let mut rng = stream_rng(123, 50);
    let mut a = String::new();
    let mut b = String::new();
    for _ in 0..10_000 {
        a.push_str(if rng.gen::<bool>() { "1\n" } else { "0\n" });
        b.push_str(if rng.gen::<bool>() { "1\n" } else { "0\n" });
    }
    let fa = write_csv(dir.path(), "a.csv", &a);
    let fb = write_csv(dir.path(), "b.csv", &b);
    let out = run_ok(&["evaluate", "--a", fa.to_str().unwrap(), "--b", fb.to_str().unwrap()]);
    let score: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(score < 0.01, "independent labels scored {score}");
}

#[test]
fn ragged_csv_exits_2_with_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", "1,2\n3,4\n5\n");
    let stderr = run_expect_code(
        &[
            "cluster", "--input", input.to_str().unwrap(), "--k", "1", "--lambda", "1.0",
            "--out-dir", dir.path().join("o").to_str().unwrap(),
        ],
        2,
    );
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn non_numeric_csv_exits_2_with_column_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", "1,2\n3,banana\n");
    let stderr = run_expect_code(
        &[
            "cluster", "--input", input.to_str().unwrap(), "--k", "1", "--lambda", "1.0",
            "--out-dir", dir.path().join("o").to_str().unwrap(),
        ],
        2,
    );
    assert!(stderr.contains("line 2") && stderr.contains("column 2"), "{stderr}");
}

#[test]
fn k_above_n_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", "1,2\n3,4\n");
    run_expect_code(
        &[
            "cluster", "--input", input.to_str().unwrap(), "--k", "5", "--lambda", "1.0",
            "--out-dir", dir.path().join("o").to_str().unwrap(),
        ],
        2,
    );
}

#[test]
fn unknown_generator_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    run_expect_code(
        &[
            "generate", "--suite", "sim9", "--seed", "1", "--out",
            dir.path().join("o").to_str().unwrap(),
        ],
        2,
    );
}

#[test]
fn evaluate_length_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_csv(dir.path(), "a.csv", "0\n1\n");
    let b = write_csv(dir.path(), "b.csv", "0\n1\n0\n");
    run_expect_code(
        &["evaluate", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap()],
        2,
    );
}

#[test]
fn tune_lambda_single_value_grid_returns_it() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(
        dir.path(),
        "x.csv",
        &blob_csv(40, 4, 0.05, 77),
    );
    let out = run_ok(&[
        "tune-lambda", "--input", input.to_str().unwrap(), "--k", "2", "--grid", "3.5",
        "--folds", "2", "--seed", "1",
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let last = stdout.lines().last().unwrap();
    assert!(last.starts_with("chosen_lambda,"), "{stdout}");
    let chosen: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(chosen, 3.5);
}

#[test]
fn tune_lambda_ties_pick_smallest() {
    // two far blobs: any moderate lambda is perfectly stable, so the tie
    // rule must surface the smallest candidate
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", &blob_csv(60, 4, 0.05, 5));
    let out = run_ok(&[
        "tune-lambda", "--input", input.to_str().unwrap(), "--k", "2", "--grid",
        "0.5,1,2,4", "--folds", "2", "--seed", "9",
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut stabilities = Vec::new();
    for line in stdout.lines().skip(1) {
        if line.starts_with("chosen_lambda,") {
            let chosen: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert_eq!(chosen, 0.5, "{stdout}");
        } else {
            stabilities.push(line.split(',').nth(1).unwrap().parse::<f64>().unwrap());
        }
    }
    assert!(stabilities.iter().all(|&s| s == 1.0), "{stdout}");
}

#[test]
fn tune_lambda_small_fold_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "x.csv", "1,2\n3,4\n5,6\n7,8\n");
    run_expect_code(
        &[
            "tune-lambda", "--input", input.to_str().unwrap(), "--k", "3", "--grid", "1.0",
            "--folds", "2", "--seed", "1",
        ],
        2,
    );
}

// On sim2 data the chosen lambda must be competitive with the best grid
// member when both are scored against the embedded ground truth.
#[test]
fn tune_lambda_choice_is_near_best_on_sim2() {
    let dataset = gen_sim2(20, 33).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rows: Vec<String> = (0..dataset.data.n_rows())
        .map(|i| {
            dataset.data
                .row(i)
                .iter()
                .map(|v| format!("{v:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let input = write_csv(dir.path(), "x.csv", &(rows.join("\n") + "\n"));

    let grid = [0.01, 0.1, 1.0, 10.0, 100.0, 500.0];
    let out = run_ok(&[
        "tune-lambda", "--input", input.to_str().unwrap(), "--k", "20", "--grid",
        "0.01,0.1,1,10,100,500", "--folds", "2", "--seed", "4",
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let chosen: f64 = stdout
        .lines()
        .last()
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();

    // exhaustive oracle: truth-NMI of every grid member on the full data
    let mut truth_nmi = std::collections::BTreeMap::new();
    for &lambda in &grid {
        let fit = ewp_fit(&dataset.data, 20, &SolverConfig::new(lambda).with_seed(4)).unwrap();
        let score = nmi(&fit.labels, &dataset.truth).unwrap();
        truth_nmi.insert(lambda.to_bits(), score);
    }
    let best = truth_nmi.values().cloned().fold(f64::NEG_INFINITY, f64::max);
    let chosen_score = truth_nmi[&chosen.to_bits()];
    assert!(
        chosen_score >= best - 0.05,
        "chosen lambda {chosen} scores {chosen_score}, best {best}"
    );
}

#[test]
fn benchmark_single_replicate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        run_ok(&[
            "benchmark", "--suite", "featsel", "--replicates", "1", "--seed", "5", "--out",
            out.to_str().unwrap(),
        ]);
    }
    let ra = fs::read(a.join("report.json")).unwrap();
    let rb = fs::read(b.join("report.json")).unwrap();
    assert_eq!(ra, rb, "report.json differs between identical runs");
    let ca = fs::read(a.join("report.csv")).unwrap();
    let cb = fs::read(b.join("report.csv")).unwrap();
    assert_eq!(ca, cb, "report.csv differs between identical runs");

    // the deterministic report validates against the shipped schema
    let report: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    let schema: serde_json::Value = serde_json::from_str(include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/benchmark_report.schema.json"
    )))
    .unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).unwrap();
    if let Err(errors) = compiled.validate(&report) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("report violates schema: {msgs:?}");
    }
    // weights file has one row per replicate
    let weights = fs::read_to_string(a.join("featsel_weights.csv")).unwrap();
    assert_eq!(weights.lines().count(), 1);
    assert_eq!(weights.lines().next().unwrap().split(',').count(), 20);
}

/// Two tight blobs at the corners of [0,1]^p, interleaved, as CSV text.
fn blob_csv(n: usize, p: usize, sigma: f64, seed: u64) -> String {
    use ewp_core::rng::stream_rng;
    use rand_distr::{Distribution, Normal};
    let mut rng = stream_rng(seed, 60);
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut out = String::new();
    for i in 0..n {
        let base = if i % 2 == 0 { 0.0 } else { 1.0 };
        let row: Vec<String> = (0..p)
            .map(|_| format!("{:.16e}", base + noise.sample(&mut rng)))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
