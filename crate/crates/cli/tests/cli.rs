//! Black-box tests against the compiled `tsc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn tsc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsc"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_then_certify_matches_direct_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsc(
        &["gen", "--n", "4", "--d", "4", "--seed", "11", "--out", "t.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");

    let from_file = tsc(
        &["certify", "--input", "t.json", "--q", "4", "--which", "both", "--deterministic"],
        dir.path(),
    );
    let from_args = tsc(
        &[
            "certify", "--n", "4", "--d", "4", "--seed", "11", "--q", "4", "--which", "both",
            "--deterministic",
        ],
        dir.path(),
    );
    assert!(from_file.status.success(), "{from_file:?}");
    assert!(from_args.status.success(), "{from_args:?}");
    assert_eq!(stdout(&from_file), stdout(&from_args));
}

#[test]
fn gen_with_payload_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsc(
        &["gen", "--n", "3", "--d", "3", "--seed", "5", "--payload", "--out", "p.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let a = tsc(
        &["certify", "--input", "p.json", "--q", "4", "--deterministic"],
        dir.path(),
    );
    let b = tsc(
        &["certify", "--n", "3", "--d", "3", "--seed", "5", "--q", "4", "--deterministic"],
        dir.path(),
    );
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn certify_deterministic_output_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = tsc(
            &[
                "certify", "--n", "4", "--d", "4", "--seed", "3", "--q", "4", "--which", "both",
                "--deterministic", "--out", name,
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{out:?}");
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn certify_report_dispatches_by_order_and_level() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (&["certify", "--n", "4", "--d", "4", "--seed", "1", "--q", "4"][..], "upper_qd"),
        (&["certify", "--n", "4", "--d", "4", "--seed", "1", "--q", "8"][..], "upper_even"),
        (&["certify", "--n", "4", "--d", "3", "--seed", "1", "--q", "4"][..], "upper_odd3"),
    ];
    for (args, key) in cases {
        let out = tsc(args, dir.path());
        assert!(out.status.success(), "{out:?}");
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert!(
            json["results"][key].is_object(),
            "expected {key} in {json}"
        );
    }
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // Odd order with a level the pipeline cannot use.
    let out = tsc(
        &["certify", "--n", "3", "--d", "3", "--seed", "1", "--q", "6"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    // Lower bounds need q = d.
    let out = tsc(
        &["certify", "--n", "4", "--d", "4", "--seed", "1", "--q", "8", "--which", "lower"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    // Missing instance description entirely.
    let out = tsc(&["certify", "--q", "4"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn budget_overflow_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsc(
        &["certify", "--n", "100", "--d", "4", "--seed", "1", "--q", "4"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn sweep_csv_shape_and_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "n": [4, 5],
        "d": 4,
        "q": [4],
        "trials": 3,
        "which": "both",
        "restarts": 5,
        "deterministic": true,
    });
    std::fs::write(dir.path().join("sweep.json"), cfg.to_string()).unwrap();

    let csv = tsc(
        &["sweep", "sweep.json", "--format", "csv", "--threads", "2"],
        dir.path(),
    );
    assert!(csv.status.success(), "{csv:?}");
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,d,q,seed,upper,lower,fmax_est,ratio_upper,c2,runtime_ms"
    );
    assert_eq!(lines.count(), 6); // 2 n-values x 1 q x 3 trials

    let json = tsc(&["sweep", "sweep.json", "--out", "rows.jsonl"], dir.path());
    assert!(json.status.success(), "{json:?}");
    let rows = std::fs::read_to_string(dir.path().join("rows.jsonl")).unwrap();
    let mut data_rows = 0;
    let mut summaries = 0;
    for line in rows.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v.get("summary").is_some() {
            summaries += 1;
        } else {
            assert!(v["upper"].is_number(), "row missing upper: {v}");
            assert!(v.get("error").is_none(), "row failed: {v}");
            data_rows += 1;
        }
    }
    assert_eq!(data_rows, 6);
    assert_eq!(summaries, 3); // upper, lower, fmax_est for the single q
}

#[test]
fn sweep_rows_are_order_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = serde_json::json!({
        "n": [4, 5],
        "d": 3,
        "q": [4],
        "trials": 2,
        "restarts": 5,
        "deterministic": true,
    });
    std::fs::write(dir.path().join("sweep.json"), cfg.to_string()).unwrap();
    let one = tsc(&["sweep", "sweep.json", "--format", "csv", "--threads", "1"], dir.path());
    let four = tsc(&["sweep", "sweep.json", "--format", "csv", "--threads", "4"], dir.path());
    assert!(one.status.success() && four.status.success());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn verify_passes_and_lists_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsc(&["verify"], dir.path());
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn fmax_reports_a_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsc(
        &["fmax", "--n", "4", "--d", "3", "--seed", "2", "--trials", "10"],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["value"].as_f64().unwrap() > 0.0);
}
