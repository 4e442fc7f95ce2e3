use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hcq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcq")).args(args).output().expect("run hcq")
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn gen_then_load_keeps_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let o = hcq(&["gen", "--kind", "cantor-dust:1", "--n", "2", "--L", "4", "--seed", "3", "--out", f.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = read(&f);
    let loaded = hcontent::io::function_from_json(&doc).unwrap();
    let spec = serde_json::from_value(doc["spec"].clone()).unwrap();
    let again = hcontent::verify::generate(&spec).unwrap();
    assert_eq!(hcontent::io::function_digest(&loaded), hcontent::io::function_digest(&again));
    assert_eq!(doc["config"]["seed"], 3);
}

#[test]
fn content_reports_value_certificate_and_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("e.json");
    let out = dir.path().join("c.json");
    assert!(hcq(&["gen", "--kind", "ball-indicator", "--L", "3", "--set", "--out", e.to_str().unwrap()]).status.success());
    let o = hcq(&["content", "--input", e.to_str().unwrap(), "--delta", "1.5", "--backend", "dyadic", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc = read(&out);
    let v = doc["result"]["value"].as_f64().unwrap();
    assert!(v > 0.0);
    assert!((doc["result"]["certificate_cost"].as_f64().unwrap() - v).abs() <= 1e-12 * v);
    assert!(doc["bracket"]["c_low"].as_f64().unwrap() < doc["bracket"]["c_high"].as_f64().unwrap());
    assert_eq!(doc["schema"], 1);
    assert!(doc["input_digest"].as_str().unwrap().len() == 64);
}

#[test]
fn verify_holder_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = hcq(&["verify", "--suite", "i7-holder", "--samples", "1000", "--seed", "7", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep = read(&dir.path().join("i7-holder.json"));
    assert_eq!(rep["summary"]["verdict"], "pass");
    assert_eq!(rep["summary"]["count"], 1000);
    assert_eq!(rep["config"]["seed"], 7);
    let csv = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(csv.starts_with("suite,count,violations"));
    assert!(csv.lines().nth(1).unwrap().starts_with("i7-holder,1000,0,"));
}

#[test]
fn reports_are_reproducible() {
    let a = hcq(&["verify", "--suite", "i6-quasi-subadditivity", "--samples", "50"]);
    let b = hcq(&["verify", "--suite", "i6-quasi-subadditivity", "--samples", "50"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_of_range_p_is_rejected_with_the_range() {
    let o = hcq(&["verify", "--suite", "thm-5.2", "--n", "2", "--delta", "1.5", "--alpha", "0.5", "--p", "0.7", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let msg = stderr(&o);
    assert!(msg.contains("(delta/n, delta/alpha) = (0.75, 3)"), "{msg}");
}

#[test]
fn in_range_p_is_accepted() {
    let o = hcq(&["verify", "--suite", "thm-5.2", "--n", "2", "--delta", "1.5", "--alpha", "0.5", "--p", "0.9", "--samples", "2", "--L", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn usage_and_io_errors_have_distinct_codes() {
    assert_eq!(hcq(&["verify", "--suite", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(hcq(&["content", "--bogus"]).status.code(), Some(2));
    assert_eq!(hcq(&["render", "--input", "/nonexistent/f.json"]).status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"suites": ["i2-zero"], "samples": 10, "seed": 1}"#).unwrap();
    let out = dir.path().join("o");
    let o = hcq(&["--config", cfg.to_str().unwrap(), "verify", "--samples", "12", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rep = read(&out.join("i2-zero.json"));
    assert_eq!(rep["summary"]["count"], 12);
    assert_eq!(rep["config"]["seed"], 1);

    std::fs::write(&cfg, r#"{"suites": ["i2-zero"], "sampels": 10}"#).unwrap();
    let o = hcq(&["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sampels"));
}

#[test]
fn maximal_riesz_and_render_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    assert!(hcq(&["gen", "--kind", "random-simple", "--L", "3", "--out", f.to_str().unwrap()]).status.success());
    let fs = f.to_str().unwrap();
    for variant in ["centered", "uncentered", "sharp", "classical"] {
        let out = dir.path().join(format!("{variant}.json"));
        let svg = dir.path().join(format!("{variant}.svg"));
        let o = hcq(&[
            "maximal", "--input", fs, "--variant", variant, "--delta", "1.5", "--kappa", "0.25",
            "--ladder", "refined", "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap(), "--scale", "log",
        ]);
        assert!(o.status.success(), "{variant}: {}", stderr(&o));
        let doc = read(&out);
        assert_eq!(doc["kind"], "operator_result");
        assert_eq!(doc["input_digest"].as_str().unwrap().len(), 64);
        assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    }
    let out = dir.path().join("r.json");
    let o = hcq(&["riesz", "--input", fs, "--delta", "2", "--alpha", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read(&out)["params"]["alpha"], 1.0);
    let o = hcq(&["riesz", "--input", fs, "--delta", "1", "--alpha", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let svg = dir.path().join("f.svg");
    assert!(hcq(&["render", "--input", fs, "--out", svg.to_str().unwrap()]).status.success());
}

#[test]
fn integrate_reports_quasi_norm() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    assert!(hcq(&["gen", "--kind", "checkerboard", "--L", "2", "--out", f.to_str().unwrap()]).status.success());
    let o = hcq(&["integrate", "--input", f.to_str().unwrap(), "--delta", "2", "--p", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    let i = doc["integral"].as_f64().unwrap();
    assert!((doc["quasi_norm"].as_f64().unwrap() - i.sqrt()).abs() < 1e-12);
}

#[test]
fn sweep_writes_rows_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = hcq(&["sweep", "--suite", "i7-holder", "--param", "delta", "--values", "1,2", "--samples", "20", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 3);
}
