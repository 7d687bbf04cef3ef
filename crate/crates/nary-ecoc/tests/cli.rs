//! End-to-end tests of the installed binary: exit codes, file outputs,
//! and byte-level determinism of every report-producing command.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nary-ecoc"));
    // Keep the ambient environment from influencing seed defaults.
    cmd.env_remove("NARY_ECOC_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(exit_code(&run(&["--help"])), 0);
    assert_eq!(exit_code(&run(&["--version"])), 0);
    assert_eq!(exit_code(&run(&["gen", "--help"])), 0);
}

#[test]
fn unknown_flags_and_bad_values_are_usage_errors() {
    assert_eq!(exit_code(&run(&["gen", "--bogus"])), 1);
    assert_eq!(exit_code(&run(&["frobnicate"])), 1);
    // Alphabet larger than the class count.
    assert_eq!(
        exit_code(&run(&["gen", "--scheme", "nary", "--classes", "7", "--n", "9"])),
        1
    );
    // Pool selection is meaningless for deterministic schemes.
    assert_eq!(
        exit_code(&run(&["gen", "--scheme", "ova", "--classes", "5", "--pool", "10"])),
        1
    );
    // Too few columns to separate the classes.
    assert_eq!(
        exit_code(&run(&[
            "gen", "--scheme", "dense", "--classes", "10", "--length", "2"
        ])),
        1
    );
}

#[test]
fn generated_matrix_analyzes_cleanly() {
    let dir = tempdir().unwrap();
    let matrix = dir.path().join("m.csv");
    let matrix_arg = matrix.to_str().unwrap();
    stdout_of(&[
        "gen", "--scheme", "nary", "--classes", "7", "--length", "6", "--n", "4", "--seed",
        "1234", "--out", matrix_arg,
    ]);

    let report = stdout_of(&["analyze", matrix_arg]);
    let json: serde_json::Value = serde_json::from_slice(&report).unwrap();
    assert_eq!(json["scheme"], "nary");
    assert_eq!(json["n_classes"], 7);
    assert_eq!(json["code_length"], 6);
    assert_eq!(json["n"], 4);
    assert_eq!(json["seed"], 1234);
    assert!(json["rho_hamming"].as_f64().unwrap() > 0.0);
    assert!(json["expected_hamming"].as_f64().is_some());
}

#[test]
fn analyze_reports_known_ova_separations() {
    let dir = tempdir().unwrap();
    let matrix = dir.path().join("ova.csv");
    let matrix_arg = matrix.to_str().unwrap();
    stdout_of(&["gen", "--scheme", "ova", "--classes", "10", "--out", matrix_arg]);
    let json: serde_json::Value =
        serde_json::from_slice(&stdout_of(&["analyze", matrix_arg])).unwrap();
    assert_eq!(json["rho_absolute"], 4.0);
    assert_eq!(json["rho_hamming"], 2.0);
    // One-vs-all matrices have no don't-care entries, so no expectation
    // fields are emitted.
    assert!(json.get("expected_hamming").is_none());
}

#[test]
fn malformed_inputs_are_data_errors() {
    let dir = tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "not,a,matrix\n").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let missing = dir.path().join("nope.csv");
    let out = run(&["analyze", missing.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    let out = run(&["eval", "--model", dir.path().join("nomodel").to_str().unwrap(), "--classes", "3"]);
    assert_eq!(exit_code(&out), 2);
}

fn train_blob_model(model_dir: &Path) -> serde_json::Value {
    let report = stdout_of(&[
        "train",
        "--classes", "5",
        "--per-class", "20",
        "--dim", "4",
        "--spread", "0.5",
        "--blob-seed", "3",
        "--scheme", "nary",
        "--n", "3",
        "--length", "8",
        "--learner", "tree",
        "--seed", "7",
        "--out", model_dir.to_str().unwrap(),
    ]);
    serde_json::from_slice(&report).unwrap()
}

#[test]
fn train_then_eval_reproduces_training_data() {
    let dir = tempdir().unwrap();
    let model_dir = dir.path().join("model");
    let summary = train_blob_model(&model_dir);
    assert_eq!(summary["n_classes"], 5);
    assert_eq!(summary["code_length"], 8);
    assert_eq!(summary["learner"], "tree");
    assert!(model_dir.join("manifest.json").is_file());
    assert!(model_dir.join("matrix.csv").is_file());

    // Trees memorize their training set, so evaluating the model on the
    // same blobs is perfect and violates no decoding margin.
    let report = stdout_of(&[
        "eval",
        "--model", model_dir.to_str().unwrap(),
        "--classes", "5",
        "--per-class", "20",
        "--dim", "4",
        "--spread", "0.5",
        "--blob-seed", "3",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&report).unwrap();
    assert_eq!(json["accuracy"], 1.0);
    assert_eq!(json["error_rate"], 0.0);
    assert_eq!(json["margin_violations"], 0);
    assert_eq!(json["bound"]["b_bar"], 0.0);
    assert_eq!(json["confusion_pct"][0][0], 100.0);
    assert_eq!(json["n_instances"], 100);
}

#[test]
fn eval_works_from_csv_files() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("data.csv");
    let mut text = String::from("f1,f2,label\n");
    for i in 0..8 {
        let (x, label) = match i % 3 {
            0 => (0.0, 10),
            1 => (5.0, 20),
            _ => (10.0, 30),
        };
        text.push_str(&format!("{},{},{}\n", x + (i as f64) * 0.01, 1.0, label));
    }
    std::fs::write(&data, text).unwrap();

    let model_dir = dir.path().join("model");
    let summary = stdout_of(&[
        "train",
        "--data", data.to_str().unwrap(),
        "--has-header",
        "--scheme", "nary",
        "--n", "3",
        "--length", "4",
        "--learner", "centroid",
        "--out", model_dir.to_str().unwrap(),
    ]);
    let summary: serde_json::Value = serde_json::from_slice(&summary).unwrap();
    assert_eq!(summary["n_classes"], 3);

    let report = stdout_of(&[
        "eval",
        "--model", model_dir.to_str().unwrap(),
        "--data", data.to_str().unwrap(),
        "--has-header",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&report).unwrap();
    assert_eq!(json["accuracy"], 1.0);
}

#[test]
fn repeated_runs_are_byte_identical() {
    // One representative per report format: matrix CSV, JSON report,
    // and each sweep CSV.
    let gen_args =
        ["gen", "--scheme", "sparse", "--classes", "8", "--length", "12", "--seed", "9", "--pool", "5"];
    assert_eq!(stdout_of(&gen_args), stdout_of(&gen_args));

    let sweep_args = [
        "sweep-n", "--classes", "5", "--per-class", "12", "--dim", "3", "--n-min", "2",
        "--n-max", "4", "--length", "6", "--reps", "2", "--learner", "centroid", "--seed", "5",
    ];
    assert_eq!(stdout_of(&sweep_args), stdout_of(&sweep_args));

    let corr_args =
        ["correlation", "--classes", "8", "--n", "4", "--lengths", "6,10", "--seeds", "5", "--seed", "7"];
    assert_eq!(stdout_of(&corr_args), stdout_of(&corr_args));
}

#[test]
fn jobs_flag_does_not_change_results() {
    let base = [
        "sweep-len", "--classes", "4", "--per-class", "12", "--dim", "3", "--n-min", "2",
        "--n-max", "3", "--lengths", "4,8", "--reps", "2", "--learner", "centroid", "--seed", "11",
    ];
    let with_jobs: Vec<&str> = base.iter().copied().chain(["--jobs", "3"]).collect();
    assert_eq!(stdout_of(&base), stdout_of(&with_jobs));
}

#[test]
fn seed_env_var_is_a_fallback_for_the_flag() {
    let flag = stdout_of(&[
        "gen", "--scheme", "nary", "--classes", "6", "--length", "8", "--n", "3", "--seed", "4321",
    ]);
    let out = bin()
        .args(["gen", "--scheme", "nary", "--classes", "6", "--length", "8", "--n", "3"])
        .env("NARY_ECOC_SEED", "4321")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(flag, out.stdout);

    // An explicit flag wins over the environment.
    let out = bin()
        .args([
            "gen", "--scheme", "nary", "--classes", "6", "--length", "8", "--n", "3", "--seed",
            "4321",
        ])
        .env("NARY_ECOC_SEED", "1")
        .output()
        .unwrap();
    assert_eq!(flag, out.stdout);
}

#[test]
fn sweep_len_rows_cover_the_grid() {
    let csv = String::from_utf8(stdout_of(&[
        "sweep-len", "--classes", "4", "--per-class", "10", "--dim", "2", "--n-min", "2",
        "--n-max", "4", "--lengths", "4,8,12", "--reps", "1", "--learner", "centroid",
    ]))
    .unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,code_length,accuracy,note");
    assert_eq!(lines.len(), 1 + 3 * 3);
}

#[test]
fn correlation_defaults_match_the_documented_study() {
    let csv = String::from_utf8(stdout_of(&["correlation", "--seeds", "2"])).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    // 2 schemes x 8 lengths plus the header.
    assert_eq!(lines.len(), 1 + 2 * 8);
    assert!(lines[1].starts_with("nary,10,"));
    assert!(lines[16].starts_with("sparse,80,"));
}
