use std::path::Path;
use std::process::{Command, Output};

fn qmaj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmaj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn header(text: &str) -> &str {
    text.lines().next().unwrap_or_default()
}

#[test]
fn lorenz_sweep_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig2.csv");
    let out = qmaj(&[
        "sweep-majorization",
        "--lambda1",
        "0.3",
        "--alpha-grid",
        "paper",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        header(&text),
        "lambda1,alpha,k,candidate_partial_sum,bound_partial_sum,slack,source"
    );
    assert_eq!(text.lines().count(), 1 + 36);
    assert!(!text.contains('\r'));
}

#[test]
fn bench_rows_extend_the_schema() {
    let out = qmaj(&[
        "sweep-majorization",
        "--lambda1",
        "0.3",
        "--alpha",
        "pi/6",
        "--bench",
        "--repeats",
        "20",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        header(&text),
        "lambda1,alpha,k,candidate_partial_sum,bound_partial_sum,slack,source,stddev,outlier_flag"
    );
    assert_eq!(text.lines().filter(|l| l.contains(",bench,")).count(), 6);
}

#[test]
fn entropy_headers() {
    let two = qmaj(&[
        "sweep-entropy2",
        "--lambda1-grid",
        "paper",
        "--alpha",
        "0",
        "--theta",
        "pi/2",
    ]);
    assert!(two.status.success());
    assert_eq!(
        header(&stdout(&two)),
        "lambda1,alpha,theta,lhs,b20,b21,tighter"
    );
    let three = qmaj(&["sweep-entropy3", "--preset", "paper"]);
    assert!(three.status.success());
    let text = stdout(&three);
    assert_eq!(
        header(&text),
        "lambda1,alpha,e_lhs,b13,b14,b15,b17,tightest,b14_anomaly_flag"
    );
    assert_eq!(text.lines().count(), 1 + 20);
}

#[test]
fn entropy2_preset_covers_all_panels() {
    let out = qmaj(&["sweep-entropy2", "--preset", "paper", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 136);
    assert_eq!(v["spec"].as_array().unwrap().len(), 4);
    let notes = v["metadata"]["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("twelve")));
}

#[test]
fn verify_reports_and_exits_cleanly() {
    let out = qmaj(&["verify", "--samples", "2000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(header(&text), "relation,checked,violations,worst_slack");
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').nth(2), Some("0"), "{line}");
    }
}

#[test]
fn negative_tolerance_is_rejected() {
    let out = qmaj(&["verify", "--samples", "10", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tightness_emits_six_rows() {
    let out = qmaj(&["tightness", "--lambda1", "0", "--resolution", "32"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(
        header(&text),
        "lambda1,k,bound_partial_sum,achieved_supremum,gap,argmax_param1,argmax_param2"
    );
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn bench_sim_with_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.toml");
    std::fs::write(&cfg, "noise_rel = 0.0\nrepeats = 3\n").unwrap();
    let out = qmaj(&[
        "bench-sim",
        "--lambda1",
        "0.2",
        "--alpha",
        "pi/3",
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let fidelity: f64 = row[12].parse().unwrap();
    assert!((fidelity - 1.0).abs() < 1e-10);
}

#[test]
fn unknown_flags_print_usage() {
    let out = qmaj(&["sweep-majorization", "--bogus"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn invalid_values_give_one_line_diagnostics() {
    for args in [
        &["sweep-majorization", "--lambda1", "0.9", "--alpha", "0"][..],
        &[
            "sweep-entropy2",
            "--lambda1",
            "0.2",
            "--alpha",
            "0",
            "--theta",
            "2",
        ][..],
        &["sweep-entropy3", "--lambda1", "0.2"][..],
        &[
            "bench-sim",
            "--lambda1",
            "0.2",
            "--alpha",
            "0",
            "--config",
            "/nonexistent.toml",
        ][..],
    ] {
        let out = qmaj(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert_eq!(err.trim_end().lines().count(), 1, "{err}");
        assert!(err.starts_with("qmaj: error:"));
    }
}

#[test]
fn unwritable_output_is_an_error() {
    let out = qmaj(&[
        "sweep-entropy3",
        "--preset",
        "paper",
        "--out",
        Path::new("/nonexistent-dir/x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
