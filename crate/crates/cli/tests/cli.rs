use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lowcross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowcross"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = lowcross(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

/// Builds points, system, matching and both colorings under `dir`.
fn pipeline(dir: &Path) {
    ok(&["gen-points", "--n", "40", "--family", "halfplanes", "--seed", "3", "--out", &p(dir, "pts.json")]);
    ok(&["gen-system", "--family", "halfplanes", "--points", &p(dir, "pts.json"), "--out", &p(dir, "full.json")]);
    ok(&["enforce-degree", "--system", &p(dir, "full.json"), "--t", "8", "--seed", "3", "--out", &p(dir, "sys.json")]);
    ok(&["match", "--system", &p(dir, "sys.json"), "--out", &p(dir, "m.json"), "--trace", &p(dir, "trace.csv")]);
    ok(&["color", "--system", &p(dir, "sys.json"), "--matching", &p(dir, "m.json"), "--out", &p(dir, "det.json")]);
    ok(&[
        "color", "--system", &p(dir, "sys.json"), "--matching", &p(dir, "m.json"), "--mode", "random", "--seed", "5",
        "--out", &p(dir, "rand.json"),
    ]);
}

#[test]
fn valid_artifacts_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    for c in ["det.json", "rand.json"] {
        let out = ok(&["verify", "--system", &p(d, "sys.json"), "--matching", &p(d, "m.json"), "--coloring", &p(d, c)]);
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(report["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    }
    let trace = fs::read_to_string(d.join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,x,y,score_log2,ranges_crossed\n"));
    assert_eq!(trace.lines().count(), 21);
    let disc = ok(&["disc", "--system", &p(d, "sys.json"), "--coloring", &p(d, "det.json"), "--format", "csv"]);
    assert!(String::from_utf8_lossy(&disc.stdout).starts_with("range,sum\n"));
}

#[test]
fn repeated_point_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    let mut m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    let first = m["pairs"][0][0].clone();
    m["pairs"][1][0] = first;
    fs::write(d.join("bad.json"), m.to_string()).unwrap();
    let out = lowcross(&["verify", "--system", &p(d, "sys.json"), "--matching", &p(d, "bad.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL matching-valid"));
}

#[test]
fn tampered_sign_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    let mut c: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("det.json")).unwrap()).unwrap();
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    let x = m["pairs"][0][0].as_u64().unwrap() as usize;
    let s = c["signs"][x].as_i64().unwrap();
    c["signs"][x] = serde_json::json!(-s);
    fs::write(d.join("bad.json"), c.to_string()).unwrap();
    let out = lowcross(&["verify", "--system", &p(d, "sys.json"), "--matching", &p(d, "m.json"), "--coloring", &p(d, "bad.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL pair-antisymmetry"));
}

#[test]
fn stale_discrepancy_is_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    pipeline(d);
    let mut c: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("det.json")).unwrap()).unwrap();
    let stored = c["discrepancy"].as_i64().unwrap();
    c["discrepancy"] = serde_json::json!(stored + 1);
    fs::write(d.join("bad.json"), c.to_string()).unwrap();
    let out = lowcross(&["verify", "--system", &p(d, "sys.json"), "--coloring", &p(d, "bad.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL discrepancy"));
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("cfg.json"), r#"{"family":"halfplanes","n_values":[],"t_values":[4],"seeds":[0],"slack":1.5,"output_path":"x.csv"}"#).unwrap();
    assert_eq!(lowcross(&["sweep", "--config", &p(d, "cfg.json")]).status.code(), Some(3));
    fs::write(d.join("cfg.json"), "{not json").unwrap();
    assert_eq!(lowcross(&["sweep", "--config", &p(d, "cfg.json")]).status.code(), Some(3));
    assert_eq!(lowcross(&["match", "--no-such-flag"]).status.code(), Some(3));
    assert_eq!(lowcross(&["match", "--system", &p(d, "missing.json")]).status.code(), Some(1));
}

#[test]
fn sweep_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = format!(
        r#"{{"family":"disks","n_values":[16,24],"t_values":[4,"inf"],"seeds":[1,2],"slack":1.5,"output_path":"{}"}}"#,
        p(d, "a.csv")
    );
    fs::write(d.join("cfg.json"), cfg).unwrap();
    ok(&["sweep", "--config", &p(d, "cfg.json")]);
    ok(&["sweep", "--config", &p(d, "cfg.json"), "--out", &p(d, "b.csv")]);
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("family,n,m,t_req,t_act,seed,N,N_pred,disc_det,disc_rand,attempts,ms\n"));
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains(",inf,"));
    assert!(d.join("a.summary.json").exists());
}

#[test]
fn csv_formats() {
    let out = ok(&["gen-points", "--n", "5", "--dim", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.split(',').count() == 3));
}
