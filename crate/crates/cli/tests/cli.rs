//! End-to-end runs of the `revpref` binary.

use std::path::Path;
use std::process::{Command, Output};

fn revpref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revpref"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn simulate_into(dir: &Path, n: usize, seed: u64) -> String {
    let records = dir.join("records.jsonl").display().to_string();
    let out = revpref(&[
        "simulate",
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--output",
        &records,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    records
}

#[test]
fn simulate_then_fit_recovers_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate_into(dir.path(), 3000, 42);
    let out = revpref(&[
        "fit",
        "--input",
        &records,
        "--resamples",
        "50",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let table = stdout(&out);
    let row = table.lines().nth(1).expect("one fitted row");
    let fields: Vec<&str> = row.split('\t').collect();
    assert_eq!(fields[0], "baseline");
    let fn_fp: f64 = fields[3].parse().unwrap();
    assert!((fn_fp - 4.0).abs() / 4.0 < 0.2, "fn_fp {fn_fp}");
}

#[test]
fn consistency_prints_ilfc_table() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate_into(dir.path(), 500, 9);
    let out = revpref(&[
        "consistency",
        "--input",
        &records,
        "--resamples",
        "10",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    let table = stdout(&out);
    assert!(table.starts_with("regime\t"));
    assert!(table.contains("baseline"));
}

#[test]
fn report_writes_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate_into(dir.path(), 400, 3);
    let out_dir = dir.path().join("report");
    let out = revpref(&[
        "report",
        "--input",
        &records,
        "--resamples",
        "10",
        "--seed",
        "2",
        "--format",
        "tables",
        "--output",
        &out_dir.display().to_string(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for name in [
        "fitted_ratios.tsv",
        "ilfc.tsv",
        "steering.tsv",
        "counterfactual.tsv",
        "sensitivity.tsv",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
}

#[test]
fn parse_subcommand_decodes_responses() {
    let out = revpref(&[
        "parse",
        "--kind",
        "probability",
        "--text",
        "No: 0.30\nYes: 0.70",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"p_elicited":0.7}"#);

    let out = revpref(&[
        "parse",
        "--kind",
        "decision",
        "--text",
        "Can decide: No\nDecision: Yes",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["action"], "defer");
    assert_eq!(value["forced_choice"], "yes");

    let out = revpref(&[
        "parse",
        "--kind",
        "self-report",
        "--text",
        "False Positive: 1\nFalse Negative: 10\nDeferral: 2",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["c_fn"], 10.0);
}

#[test]
fn failures_exit_nonzero_with_error_record() {
    let out = revpref(&["fit", "--input", "/no/such/file.jsonl"]);
    assert!(!out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(record["error"]["kind"], "io");

    let out = revpref(&[
        "parse",
        "--kind",
        "probability",
        "--text",
        "No: 0.9\nYes: 0.9",
    ]);
    assert!(!out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(record["error"]["kind"], "response_parse");
    assert!(record["error"]["message"]
        .as_str()
        .unwrap()
        .contains("outside tolerance"));
}

#[test]
fn config_file_and_custom_catalog_are_honored() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate_into(dir.path(), 400, 8);

    let catalog = dir.path().join("catalog.json");
    std::fs::write(
        &catalog,
        r#"[{"id": "strict", "c_fp": 1.0, "c_fn": 8.0, "c_defer": 0.2}]"#,
    )
    .unwrap();

    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"regimes": ["baseline"], "n_resamples": 12, "seed": 6,
            "fit": {"max_iterations": 200}}"#,
    )
    .unwrap();

    let out = revpref(&[
        "fit",
        "--input",
        &records,
        "--catalog",
        &catalog.display().to_string(),
        "--config",
        &config.display().to_string(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = stdout(&out);
    let row = table.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split('\t').collect();
    assert_eq!(fields[9], "12", "config n_resamples should apply: {row}");

    // A record referencing a benchmark outside the custom catalog fails
    // validation by name.
    let bad = dir.path().join("bad.jsonl");
    let line = std::fs::read_to_string(&records).unwrap();
    let first = line.lines().next().unwrap();
    std::fs::write(
        &bad,
        first.replace("\"baseline\":", "\"cost:unknown\":\"yes\",\"baseline\":"),
    )
    .unwrap();
    let out = revpref(&[
        "fit",
        "--input",
        &bad.display().to_string(),
        "--catalog",
        &catalog.display().to_string(),
    ]);
    assert!(!out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(record["error"]["kind"], "invalid_dataset");
    assert!(record["error"]["message"]
        .as_str()
        .unwrap()
        .contains("benchmark 'unknown'"));
}

#[test]
fn sensitivity_control_row_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let records = simulate_into(dir.path(), 300, 4);
    let out = revpref(&[
        "sensitivity",
        "--input",
        &records,
        "--sds",
        "0,0.05",
        "--repetitions",
        "3",
        "--resamples",
        "5",
        "--seed",
        "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let table = stdout(&out);
    let control = table.lines().nth(1).unwrap();
    let fields: Vec<&str> = control.split('\t').collect();
    assert_eq!(fields[1], "0");
    assert_eq!(fields[3], "0");
}
