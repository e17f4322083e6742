use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_initial-integrals"))
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("initial-integrals-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let path = self.0.join(name);
        std::fs::write(&path, body).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with(args: &[&str], files: &[&Path]) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    for f in files {
        cmd.arg(f);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const MEAN_TARGET: &str = r#"{"dim":1,"p":"1","basepoint":["1"],"delta":[["1/2","1/2"]],"norm":{"kind":"sup"}}"#;
const SIMPLE_FN: &str = r#"{"space":{"points":["a","b"],"weights":{"a":"1/2","b":"1/2"}},"values":{"a":"3","b":"5"}}"#;

#[test]
fn integrate_step() {
    let s = Scratch::new("integrate");
    let f = s.file("f.json", "[1, 0, 2, 5]");
    assert_eq!(json(&run_with(&["integrate"], &[&f])), Value::from("2"));
    let text = run_with(&["--format", "text", "integrate"], &[&f]);
    assert_eq!(String::from_utf8(text.stdout).unwrap().trim(), "2");
}

#[test]
fn integrate_complex_step() {
    let s = Scratch::new("complex");
    let f = s.file("f.json", r#"[{"re": "1", "im": "2"}, {"re": "3", "im": "0"}]"#);
    let v = json(&run_with(&["--complex", "integrate"], &[&f]));
    assert_eq!(v, serde_json::json!({"re": "2", "im": "1"}));
}

#[test]
fn indefinite_of_constant_one() {
    let s = Scratch::new("indefinite");
    let f = s.file("f.json", r#"{"level": 2, "coeffs": ["1", "1", "1", "1"]}"#);
    let v = json(&run_with(&["indefinite"], &[&f]));
    assert_eq!(v["values"], serde_json::json!(["0", "1/4", "1/2", "3/4", "1"]));
}

#[test]
fn pairing_requires_conjugate_exponents() {
    let s = Scratch::new("pair");
    let f = s.file("f.json", "[1, 2]");
    let g = s.file("g.json", "[3, 4]");
    let ok = run_with(&["pair", "--p", "2", "--q", "2"], &[&f, &g]);
    assert_eq!(json(&ok), Value::from("11/2"));
    let bad = run_with(&["pair", "--p", "2", "--q", "3"], &[&f, &g]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("non-conjugate exponents"));
}

#[test]
fn compile_apply_verify_roundtrip() {
    let s = Scratch::new("compile");
    let target = s.file("t.json", MEAN_TARGET);
    let table = s.path("m.json");
    let out = run(&["compile", "--target", target.to_str().unwrap(), "--max-level", "4", "-o", table.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let step = s.file("f.json", "[1, 0, 2, 5]");
    let applied = json(&run(&["apply", "--table", table.to_str().unwrap(), "--step", step.to_str().unwrap()]));
    assert_eq!(applied, serde_json::json!(["2"]));
    let report = json(&run(&["verify", "--table", table.to_str().unwrap(), "--samples", "50", "--seed", "7"]));
    assert_eq!(report["passed"], Value::Bool(true));
}

#[test]
fn compile_rejects_expanding_delta() {
    let s = Scratch::new("expanding");
    let target = s.file("t.json", r#"{"dim":1,"p":"1","basepoint":["1"],"delta":[["1","1"]],"norm":{"kind":"sup"}}"#);
    let out = run(&["compile", "--target", target.to_str().unwrap(), "--max-level", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_input_is_an_error() {
    let out = run(&["integrate", "/nonexistent/step.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn sequence_head_target() {
    let s = Scratch::new("seq");
    let target = s.file(
        "t.json",
        r#"{"name":"head","dim":1,"p":"2","delta":[["1","0"]],"norm":{"kind":"sup"}}"#,
    );
    let seq = s.file("a.json", r#"{"coeffs": ["7", "3", "1"]}"#);
    let v = json(&run(&["seq-apply", "--target", target.to_str().unwrap(), "--seq", seq.to_str().unwrap()]));
    assert_eq!(v, serde_json::json!(["7"]));
}

#[test]
fn measure_commands() {
    let s = Scratch::new("measure");
    let f = s.file("f.json", SIMPLE_FN);
    assert_eq!(json(&run_with(&["measure", "integrate"], &[&f])), Value::from("4"));
    let density = json(&run_with(&["measure", "density"], &[&f]));
    assert_eq!(density["mass"], serde_json::json!({"a": "3/2", "b": "5/2"}));
    let sp = s.file("sp.json", r#"{"kind":"simple_functions","p":"2"}"#);
    let psi = json(&run_with(&["measure", "psi", "--target", sp.to_str().unwrap()], &[&f]));
    assert_eq!(psi, serde_json::json!(["3", "5"]));
}

#[test]
fn measure_psi_names_violated_axiom() {
    let s = Scratch::new("psi-bad");
    let f = s.file("f.json", SIMPLE_FN);
    let bad = s.file("bad.json", r#"{"kind":"doubled_unit","p":"1"}"#);
    let out = run_with(&["measure", "psi", "--target", bad.to_str().unwrap()], &[&f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("III"));
}

#[test]
fn measure_verify_categories() {
    for cat in ["Bemb", "B", "H"] {
        let v = json(&run(&["measure", "verify", "--category", cat, "--trials", "20", "--seed", "3"]));
        assert_eq!(v["passed"], Value::Bool(true), "category {cat}");
    }
    let s = Scratch::new("mverify");
    let bad = s.file("bad.json", r#"{"kind":"squared_mass"}"#);
    let out = run(&["measure", "verify", "--category", "B", "--trials", "50", "--target", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_all_is_deterministic() {
    let a = run(&["verify-all", "--seed", "5", "--trials", "10"]);
    let b = run(&["verify-all", "--seed", "5", "--trials", "10"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema_version"], Value::from(1));
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn verify_all_flags_broken_extra_target() {
    let s = Scratch::new("extra");
    let bad = s.file("bad.json", r#"{"name":"doubling","dim":1,"p":"1","basepoint":["1"],"delta":[["1","1"]],"norm":{"kind":"sup"}}"#);
    let json_out = s.path("report.json");
    let out = run(&[
        "verify-all",
        "--seed",
        "5",
        "--trials",
        "10",
        "--extra-target",
        bad.to_str().unwrap(),
        "--json-out",
        json_out.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_out).unwrap()).unwrap();
    let anchors: Vec<&str> = v["failures"].as_array().unwrap().iter().map(|f| f["anchor"].as_str().unwrap()).collect();
    assert_eq!(anchors, ["target:doubling/construction-gate"]);
}

#[test]
fn adamek_chain_stages() {
    for functor in ["double", "prepend"] {
        let v = json(&run(&["adamek", "--functor", functor, "--p", "2", "--stages", "4"]));
        assert_eq!(v["passed"], Value::Bool(true), "{functor}");
    }
}
