use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pellip(config: &Path, out: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pellip"))
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("PELLIP_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn docs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs")
}

fn record(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("run.json")).unwrap()).unwrap()
}

#[test]
fn delta_of_boundary_rotation_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let res = pellip(&docs().join("delta.json"), &out, &[]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(out.join("delta.json")).unwrap()).unwrap();
    assert!(report["delta"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn spectrum_vertex_row() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "s.json",
        r#"{"command": "spectrum", "inputs": {"p": 4, "alpha": 1, "y": 0}}"#,
    );
    let out = tmp.path().join("run");
    let res = pellip(&cfg, &out, &[]);
    assert_eq!(res.status.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("parabola.csv")).unwrap(), "y,x,arg\n0,0.1875,0\n");
    assert!(out.join("tangency.json").exists());
}

#[test]
fn unknown_command_is_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", r#"{"command": "frobnicate", "inputs": {}}"#);
    let res = pellip(&cfg, &tmp.path().join("run"), &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("frobnicate"));
}

#[test]
fn schema_errors_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"command": "delta", "inputs": {"A": {"d": 2, "polar": [1, 0]}, "pp": 4}}"#,
    );
    let res = pellip(&cfg, &tmp.path().join("run"), &[]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("pp") && err.contains("delta"), "{err}");

    let cfg = write_config(tmp.path(), "d.json", r#"{"command": "spectrum", "inputs": {"p": 0.5}}"#);
    let res = pellip(&cfg, &tmp.path().join("run2"), &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("`p`"));
}

#[test]
fn verdict_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rigidity");
    assert_eq!(pellip(&docs().join("rigidity.json"), &out, &[]).status.code(), Some(3));
    assert_eq!(record(&out)["verdicts"]["rigidity"], "negativity-witness");
    assert_eq!(record(&out)["exit_code"], 3);

    let out = tmp.path().join("contract");
    assert_eq!(pellip(&docs().join("contract_violation.json"), &out, &[]).status.code(), Some(3));
    assert_eq!(record(&out)["verdicts"]["contractivity"], "violation");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(pellip(&docs().join("flow.json"), &a, &[]).status.code(), Some(0));
    assert_eq!(pellip(&docs().join("flow.json"), &b, &["--threads", "1"]).status.code(), Some(0));
    let (ra, rb) = (record(&a), record(&b));
    assert_eq!(ra["files"], rb["files"]);
    assert_eq!(ra["config_sha256"], rb["config_sha256"]);
    for f in ra["files"].as_array().unwrap() {
        let name = f["path"].as_str().unwrap();
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    let trace = fs::read_to_string(a.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,E,norm_p,norm_q,bilinear\n"));
    // 12 default times plus t = 0
    assert_eq!(trace.lines().count(), 1 + 13);
}

#[test]
fn seed_flag_changes_the_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    pellip(&docs().join("delta.json"), &a, &[]);
    pellip(&docs().join("delta.json"), &b, &["--seed", "99"]);
    assert_ne!(record(&a)["config_sha256"], record(&b)["config_sha256"]);
    assert_eq!(record(&b)["seed"], 99);
}

#[test]
fn manifest_covers_emitted_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    pellip(&docs().join("certify.json"), &out, &[]);
    let rec = record(&out);
    let mut listed: Vec<&str> = rec["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    listed.sort();
    let mut on_disk: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "run.json")
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    assert!(listed.contains(&"certificate.json") && listed.contains(&"delta_calibration.json"));
}

#[test]
fn witness_round_trips_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    pellip(&docs().join("rigidity.json"), &out, &[]);
    let cert: Value = serde_json::from_str(&fs::read_to_string(out.join("certificate.json")).unwrap()).unwrap();
    let witness = &cert["witness"];
    for key in ["omega", "x", "y"] {
        for v in witness[key].as_array().unwrap() {
            let x = v.as_f64().unwrap();
            let text = serde_json::to_string(&x).unwrap();
            assert_eq!(serde_json::from_str::<f64>(&text).unwrap().to_bits(), x.to_bits());
            let long: f64 = format!("{x:.16e}").parse().unwrap();
            assert_eq!(long.to_bits(), x.to_bits());
        }
    }
}

#[test]
fn every_docs_config_validates() {
    let tmp = tempfile::tempdir().unwrap();
    for entry in fs::read_dir(docs()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let name = path.file_stem().unwrap().to_owned();
            let res = pellip(&path, &tmp.path().join(name), &[]);
            let code = res.status.code().unwrap();
            assert!(matches!(code, 0 | 3 | 4), "{}: {}", path.display(), String::from_utf8_lossy(&res.stderr));
        }
    }
}
