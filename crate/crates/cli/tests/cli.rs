//! End-to-end runs of the compiled binary: the documented flag surface, the
//! exit-code contract, report round-trips, and byte determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use axiograd::{Attribution, AxiomReport, Verdict};

fn run_in(dir: &Path, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_axiograd"));
    cmd.args(args).current_dir(dir).env_remove("AXIOGRAD_SEED");
    for (key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().expect("the binary should spawn")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    run_in(dir, args, &[])
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("the binary should exit, not be signaled")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("reports are UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("messages are UTF-8")
}

/// A fresh scratch directory per test, so parallel tests never share files.
fn scratch(label: &str) -> PathBuf {
    static COUNTER: AtomicUsize = AtomicUsize::new(0);
    let dir = std::env::temp_dir().join(format!(
        "axiograd-cli-{label}-{}-{}",
        std::process::id(),
        COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).expect("fixture write");
    path
}

const MONO_2_1: &str = r#"{
  "dim": 2,
  "box": {"lower": [-4.0, -4.0], "upper": [4.0, 4.0]},
  "monomial": {"exponents": [2, 1], "center": [0.0, 0.0]}
}"#;

const MAX_NET: &str = r#"{
  "dim": 2,
  "box": {"lower": [-4.0, -4.0], "upper": [4.0, 4.0]},
  "layers": [
    {"type": "affine", "W": [[1.0, -1.0], [0.0, 1.0]], "b": [0.0, 0.0]},
    {"type": "elementwise", "acts": ["relu", "identity"]},
    {"type": "affine", "W": [[1.0, 1.0]], "b": [0.0]}
  ]
}"#;

const EXP_SUM: &str = r#"{
  "dim": 2,
  "box": {"lower": [-4.0, -4.0], "upper": [4.0, 4.0]},
  "expr": {"op": "exp", "arg": {"op": "add", "args": [
    {"op": "var", "index": 0}, {"op": "var", "index": 1}
  ]}}
}"#;

#[test]
fn attribute_ig_on_the_monomial_splits_two_to_one() {
    let dir = scratch("ig-mono");
    write(&dir, "mono.json", MONO_2_1);
    let out = run(
        &dir,
        &["attribute", "--model", "mono.json", "--method", "ig", "--input", "1,1", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report: Attribution = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert!((report.values[0] - 2.0 / 3.0).abs() <= 1e-10, "got {:?}", report.values);
    assert!((report.values[1] - 1.0 / 3.0).abs() <= 1e-10, "got {:?}", report.values);
    assert_eq!(report.method, "ig");
}

#[test]
fn attribute_shapley_on_the_monomial_splits_evenly() {
    let dir = scratch("shapley-mono");
    write(&dir, "mono.json", MONO_2_1);
    let out = run(
        &dir,
        &["attribute", "--model", "mono.json", "--method", "shapley", "--input", "1,1", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report: Attribution = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert_eq!(report.values, vec![0.5, 0.5], "exact telescoping enumeration");
}

#[test]
fn attribute_on_the_diagonal_max_exits_two() {
    let dir = scratch("max-diag");
    write(&dir, "max.json", MAX_NET);
    let out = run(
        &dir,
        &["attribute", "--model", "max.json", "--method", "ig", "--input", "1,1", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("nondifferentiable"),
        "the message should say why: {}",
        stderr(&out)
    );
}

#[test]
fn closed_form_requires_the_baseline_at_the_center() {
    let dir = scratch("closed-form");
    write(&dir, "mono.json", MONO_2_1);
    let good = run(
        &dir,
        &["attribute", "--model", "mono.json", "--method", "monomial-closed-form", "--input", "2,2", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&good), 0, "stderr: {}", stderr(&good));
    let report: Attribution = serde_json::from_str(&stdout(&good)).expect("round-trip");
    assert!((report.values[0] - 16.0 / 3.0).abs() <= 1e-12, "got {:?}", report.values);
    assert!((report.values[1] - 8.0 / 3.0).abs() <= 1e-12, "got {:?}", report.values);

    let shifted = run(
        &dir,
        &["attribute", "--model", "mono.json", "--method", "monomial-closed-form", "--input", "2,2", "--baseline", "0.5,0"],
    );
    assert_eq!(exit_code(&shifted), 1, "a shifted baseline is a config error");
    assert!(stderr(&shifted).contains("center"), "got: {}", stderr(&shifted));
}

#[test]
fn attribute_csv_has_one_column_per_coordinate() {
    let dir = scratch("attr-csv");
    write(&dir, "mono.json", MONO_2_1);
    let out = run(
        &dir,
        &["attribute", "--model", "mono.json", "--method", "ig", "--input", "1,1", "--baseline", "0,0", "--format", "csv"],
    );
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,a1,a2,residual,quad_error"));
    let row = lines.next().expect("one data row");
    assert!(row.starts_with("ig,"), "got: {row}");
}

#[test]
fn axioms_all_for_ig_passes_and_exits_zero() {
    let dir = scratch("axioms-all");
    let out = run(
        &dir,
        &["axioms", "--method", "ig", "--all", "--seed", "42", "--cases", "40"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let reports: Vec<AxiomReport> = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert_eq!(reports.len(), 12, "one report per axiom");
    for report in &reports {
        assert_eq!(report.verdict, Verdict::Pass, "{} should pass", report.axiom);
        assert_eq!(report.seed, 42);
    }
}

#[test]
fn axioms_shapley_monomial_distribution_fails_and_exits_three() {
    let dir = scratch("axioms-fail");
    let out = run(
        &dir,
        &["axioms", "--method", "shapley", "--axiom", "monomial-distribution", "--cases", "25"],
    );
    assert_eq!(exit_code(&out), 3, "stderr: {}", stderr(&out));
    let reports: Vec<AxiomReport> = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].verdict, Verdict::Fail);
    assert!(reports[0].worst > 1e-6, "a real violation: {}", reports[0].worst);
    assert!(reports[0].witness.is_some(), "failures carry their witness");
}

#[test]
fn axioms_with_zero_cases_is_inapplicable_and_exits_zero() {
    let dir = scratch("axioms-empty");
    let out = run(&dir, &["axioms", "--method", "ig", "--axiom", "asi", "--cases", "0"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let reports: Vec<AxiomReport> = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert_eq!(reports[0].verdict, Verdict::Inapplicable);
    assert_eq!(reports[0].cases, 0);
}

#[test]
fn axioms_reports_are_byte_deterministic() {
    let dir = scratch("axioms-det");
    let args = [
        "axioms", "--method", "path:power", "--axiom", "symmetry-preserving", "--axiom",
        "completeness", "--seed", "9", "--cases", "30", "--format", "csv",
    ];
    let first = run(&dir, &args);
    let second = run(&dir, &args);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "same config + seed, same bytes");
    let text = stdout(&first);
    assert!(
        text.starts_with("method,axiom,verdict,worst,cases,seed\n"),
        "got: {text}"
    );
    assert!(text.contains("path:power,symmetry-preserving,pass"), "got: {text}");
}

#[test]
fn the_seed_environment_variable_beats_the_flag() {
    let dir = scratch("axioms-env");
    let out = run_in(
        &dir,
        &["axioms", "--method", "ig", "--axiom", "dummy", "--cases", "5", "--seed", "42"],
        &[("AXIOGRAD_SEED", "7")],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let reports: Vec<AxiomReport> = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert_eq!(reports[0].seed, 7, "the environment wins");
    assert!(stderr(&out).contains("AXIOGRAD_SEED"), "got: {}", stderr(&out));
}

#[test]
fn the_config_file_beats_flags_with_a_warning() {
    let dir = scratch("config-file");
    write(&dir, "mono.json", MONO_2_1);
    write(&dir, "run.json", r#"{"command": "attribute", "method": "shapley"}"#);
    let out = run(
        &dir,
        &["attribute", "--config", "run.json", "--model", "mono.json", "--method", "ig", "--input", "1,1", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let report: Attribution = serde_json::from_str(&stdout(&out)).expect("round-trip");
    assert_eq!(report.method, "shapley", "file beats flag");
    assert!(stderr(&out).contains("overrides --method"), "got: {}", stderr(&out));

    let mismatched = run(
        &dir,
        &["axioms", "--config", "run.json", "--method", "ig", "--all"],
    );
    assert_eq!(exit_code(&mismatched), 1, "the file names a different command");
}

#[test]
fn converge_taylor_reaches_the_expected_remainder() {
    let dir = scratch("taylor");
    write(&dir, "expsum.json", EXP_SUM);
    let out = run(
        &dir,
        &["converge", "--kind", "taylor", "--model", "expsum.json", "--input", "0.4,0.4", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,a1,a2,delta,residual"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 8, "orders 1..=8 by default");
    let last: Vec<&str> = rows.last().unwrap().split(',').collect();
    assert_eq!(last[0], "8");
    let delta: f64 = last[3].parse().expect("delta column");
    assert!(delta <= 1e-6, "order-8 truncation: {delta}");
}

#[test]
fn converge_softplus_closes_on_the_relu_attribution() {
    let dir = scratch("softplus");
    write(&dir, "max.json", MAX_NET);
    let out = run(
        &dir,
        &["converge", "--kind", "softplus", "--model", "max.json", "--input", "2,1", "--baseline", "0,0"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let rows: Vec<String> = stdout(&out).lines().skip(1).map(str::to_owned).collect();
    assert_eq!(rows.len(), 4, "default grid 1,10,100,1000");
    let deltas: Vec<f64> = rows
        .iter()
        .map(|row| row.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(
        deltas.windows(2).all(|w| w[1] < w[0]),
        "sharper smoothing, smaller gap: {deltas:?}"
    );
    assert!(deltas.last().unwrap() <= &1e-2, "final delta: {deltas:?}");
}

#[test]
fn reports_can_be_written_to_a_file() {
    let dir = scratch("outfile");
    write(&dir, "mono.json", MONO_2_1);
    let out = run(
        &dir,
        &["attribute", "--model", "mono.json", "--method", "ig", "--input", "1,1", "--baseline", "0,0", "--out", "report.json"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).is_empty(), "the report went to the file");
    let text = std::fs::read_to_string(dir.join("report.json")).expect("report file");
    let report: Attribution = serde_json::from_str(&text).expect("round-trip");
    assert_eq!(report.method, "ig");
}

#[test]
fn config_mistakes_exit_one_with_a_message() {
    let dir = scratch("config-errors");
    write(&dir, "mono.json", MONO_2_1);
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (
            vec!["attribute", "--model", "missing.json", "--method", "ig", "--input", "1,1", "--baseline", "0,0"],
            "missing.json",
        ),
        (
            vec!["attribute", "--model", "mono.json", "--method", "sorcery", "--input", "1,1", "--baseline", "0,0"],
            "unknown method",
        ),
        (
            vec!["attribute", "--model", "mono.json", "--method", "ig", "--input", "1,1,1", "--baseline", "0,0,0"],
            "the model takes 2",
        ),
        (
            vec!["attribute", "--model", "mono.json", "--method", "ig", "--input", "1,abc", "--baseline", "0,0"],
            "not a decimal number",
        ),
        (vec!["axioms", "--method", "ig"], "--all"),
        (
            vec!["axioms", "--method", "ig", "--axiom", "tidiness"],
            "unknown axiom",
        ),
        (
            vec!["converge", "--kind", "sideways", "--model", "mono.json", "--input", "1,1", "--baseline", "0,0"],
            "unknown study kind",
        ),
    ];
    for (args, needle) in cases {
        let out = run(&dir, &args);
        assert_eq!(exit_code(&out), 1, "args {args:?}; stderr: {}", stderr(&out));
        assert!(
            stderr(&out).contains(needle),
            "args {args:?}: expected {needle:?} in: {}",
            stderr(&out)
        );
    }
}
