use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use catp_core::qasm;
use serde_json::Value;
use tempfile::TempDir;

fn catp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn error_code(out: &Output) -> i64 {
    let rec: Value = serde_json::from_slice(&out.stderr).expect("error record on stderr");
    assert!(rec["error"].is_string() && rec["message"].is_string());
    rec["code"].as_i64().unwrap()
}

/// Writes the bundled ansatz and a two-set binding file into `dir`.
fn inputs(dir: &Path) -> (PathBuf, PathBuf) {
    let ansatz = dir.join("ansatz.qasm");
    let out = catp(&["ansatz", "--out", s(&ansatz)]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let binds = dir.join("bindings.json");
    fs::write(
        &binds,
        r#"[{"gamma_1": 2.4, "beta_1": 2.7}, {"gamma_1": 0.3, "beta_1": 0.7}]"#,
    )
    .unwrap();
    (ansatz, binds)
}

fn transpile(ansatz: &Path, cal_dir: &Path, binds: &Path, out: &Path) -> Output {
    catp(&[
        "transpile",
        "--circuit",
        s(ansatz),
        "--calibration-dir",
        s(cal_dir),
        "--bindings",
        s(binds),
        "--out",
        s(out),
    ])
}

#[test]
fn transpile_writes_every_artifact_and_reruns_identically() {
    let tmp = TempDir::new().unwrap();
    let (ansatz, binds) = inputs(tmp.path());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = transpile(&ansatz, &data("calibration"), &binds, dir);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let mut names: Vec<String> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    for want in [
        "pqc.qasm",
        "matched.qasm",
        "final.qasm",
        "final_0.qasm",
        "final_1.qasm",
        "metrics.json",
        "timings.json",
    ] {
        assert!(names.iter().any(|n| n == want), "missing {want}");
    }
    for n in names.iter().filter(|n| *n != "timings.json") {
        assert_eq!(
            fs::read(a.join(n)).unwrap(),
            fs::read(b.join(n)).unwrap(),
            "{n} differs between runs"
        );
    }
    for n in names.iter().filter(|n| n.ends_with(".qasm")) {
        qasm::parse(&fs::read_to_string(a.join(n)).unwrap()).unwrap();
    }

    let m = json(&a.join("metrics.json"));
    let cx_pct = m["tapt"]["metrics"]["delta"]["cx_pct"].as_f64().unwrap();
    assert!((cx_pct - 30.0).abs() < 1e-9, "routing cx increase {cx_pct}");
    // The second snapshot is a small jitter of the first, the third is a fresh day.
    let snaps = m["snapshots"].as_array().unwrap();
    let drift: Vec<Value> = snaps.iter().map(|r| r["drift"].clone()).collect();
    assert_eq!(
        drift,
        vec![Value::Null, Value::Bool(false), Value::Bool(true)]
    );
    assert_eq!(m["matches"].as_array().unwrap().len(), 2);

    let t = json(&a.join("timings.json"));
    assert_eq!(t["stages"]["tapt"].as_array().unwrap().len(), 1);
    assert_eq!(t["stages"]["nam"].as_array().unwrap().len(), 2);
    assert_eq!(t["stages"]["do"].as_array().unwrap().len(), 2);
}

#[test]
fn identical_snapshots_match_once() {
    let tmp = TempDir::new().unwrap();
    let (ansatz, binds) = inputs(tmp.path());
    let cal = tmp.path().join("cal");
    fs::create_dir(&cal).unwrap();
    let first = fs::read_to_string(data("calibration/2022-06-01.json")).unwrap();
    fs::write(cal.join("a.json"), &first).unwrap();
    fs::write(
        cal.join("b.json"),
        first.replace("2022-06-01", "2022-06-05"),
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let out = transpile(&ansatz, &cal, &binds, &out_dir);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = json(&out_dir.join("metrics.json"));
    assert_eq!(m["matches"].as_array().unwrap().len(), 1);
    assert_eq!(m["snapshots"][1]["rematched"], Value::Bool(false));
    assert!(!out_dir.join("matched_1.qasm").exists());
}

#[test]
fn cost_table_uses_reference_devices() {
    let tmp = TempDir::new().unwrap();
    let rows_path = tmp.path().join("cost.json");
    let out = catp(&["cost", "--out", s(&rows_path)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ibmq_ehningen") && text.contains("ibm_hanoi"));
    let rows = json(&rows_path);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    // Five circuits on ibmq_ehningen: 18.13 + 4.41 + 5 * 2.26 against 5 * 30.
    let r = &rows[0];
    assert_eq!(r["device"], "ibmq_ehningen");
    assert!((r["ca_cer"].as_f64().unwrap() - 33.84).abs() < 1e-9);
    assert!((r["baseline"].as_f64().unwrap() - 150.0).abs() < 1e-9);
}

#[test]
fn failures_exit_with_their_class_code() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.qasm");
    let out = catp(&["tapt", "--circuit", s(&missing), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_code(&out), 3);

    let bad = tmp.path().join("bad.qasm");
    fs::write(&bad, "OPENQASM 2.0;\nqreg q[2];\ncx q[0], q[5];\n").unwrap();
    let out = catp(&["tapt", "--circuit", s(&bad), "--out", s(tmp.path())]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_code(&out), 4);

    let out = catp(&["tapt", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    let (ansatz, _) = inputs(tmp.path());
    let dir = tmp.path().join("bounded");
    let out = catp(&[
        "tapt",
        "--circuit",
        s(&ansatz),
        "--cx-max-increase",
        "10",
        "--max-retries",
        "1",
        "--out",
        s(&dir),
    ]);
    assert_eq!(out.status.code(), Some(7));
    assert_eq!(error_code(&out), 7);
    // The best attempt is still written for inspection.
    assert!(dir.join("pqc.qasm").exists());
}

#[test]
fn stages_chain_through_files() {
    let tmp = TempDir::new().unwrap();
    let (ansatz, binds) = inputs(tmp.path());
    let routed = tmp.path().join("routed");
    assert!(
        catp(&["tapt", "--circuit", s(&ansatz), "--out", s(&routed)])
            .status
            .success()
    );
    let matched = tmp.path().join("matched");
    let out = catp(&[
        "nam",
        "--circuit",
        s(&routed.join("pqc.qasm")),
        "--calibration",
        s(&data("calibration/2022-06-03.json")),
        "--out",
        s(&matched),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = json(&matched.join("match.json"));
    assert!(m["score"].as_f64().unwrap() >= m["identity_score"].as_f64().unwrap());
    let bound = tmp.path().join("bound");
    let out = catp(&[
        "bind",
        "--circuit",
        s(&matched.join("matched.qasm")),
        "--bindings",
        s(&binds),
        "--out",
        s(&bound),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let fin = qasm::parse(&fs::read_to_string(bound.join("final_0.qasm")).unwrap()).unwrap();
    assert!(fin.is_bound());

    let out = catp(&[
        "simulate",
        "--circuit",
        s(&bound.join("final_0.qasm")),
        "--shots",
        "1000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let sim: Value = serde_json::from_slice(&out.stdout).unwrap();
    let total: u64 = sim["counts"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(total, 1000);
}
