//! End-to-end tests of the `cyclefield` binary: exit codes, file formats,
//! diagnostics and byte-for-byte reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cyclefield::construct::{build_field, BuildOptions, FieldFile, Mode};
use cyclefield::config::ConfigFile;
use cyclefield::ratpoly::Poly;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cyclefield"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SINGLE: &str = r#"{"cycles": [{"center": ["0", "0"], "radius": "1", "period": 3.14, "multiplicity": 1, "stability": -1}]}"#;

const NESTED: &str = r#"{"cycles": [
  {"center": ["0", "0"], "radius": "5/2", "period": 1.0, "multiplicity": 1, "stability": -1},
  {"center": ["5/32", "0"], "radius": "15/8", "period": 2.0, "multiplicity": 2, "stability": 1}
]}"#;

#[test]
fn build_single_cycle_writes_exact_field() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.json", SINGLE);
    let out = dir.path().join("field.json");
    let o = run(&["build", "--input", s(&input), "--output", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let file = FieldFile::from_json(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file.degree_bound, 8);
    let v = file.into_field().unwrap();
    assert!(v.degree() <= 7);
    assert_eq!(v.config.extra_circles.len(), 1);
}

#[test]
fn file_round_trip_preserves_rationals() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.json", NESTED);
    let out = dir.path().join("field.json");
    assert_eq!(code(&run(&["build", "--input", s(&input), "--output", s(&out)])), 0);
    let from_file = FieldFile::from_json(&fs::read_to_string(&out).unwrap()).unwrap().into_field().unwrap();
    let c = ConfigFile::from_json(NESTED).unwrap().into_configuration().unwrap();
    let direct = build_field(&c, Mode::Full, BuildOptions::default()).unwrap();
    assert_eq!(from_file, direct);
}

#[test]
fn forest_input_is_laid_out_then_built() {
    let dir = tempfile::tempdir().unwrap();
    let forest = r#"{"forest": [{"period": 2.0, "multiplicity": 1, "stability": 1, "children": [{"period": 1.0, "multiplicity": 1, "stability": -1}]}]}"#;
    let input = write(dir.path(), "f.json", forest);
    let o = run(&["layout", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let laid: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(laid["cycles"].as_array().unwrap().len(), 2);
    let o = run(&["build", "--input", s(&input), "--mode", "lr"]);
    assert_eq!(code(&o), 0);
    let field: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(field["configuration"], laid);
}

#[test]
fn tangent_circles_give_overlap_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"cycles": [
      {"center": ["0", "0"], "radius": "1", "period": 1.0, "multiplicity": 1, "stability": 1},
      {"center": ["2", "0"], "radius": "1", "period": 1.0, "multiplicity": 1, "stability": 1}]}"#;
    let input = write(dir.path(), "bad.json", bad);
    let o = run(&["build", "--input", s(&input), "--json-diagnostics"]);
    assert_eq!(code(&o), 3);
    let diag: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(diag["error"], "Overlap");
    assert_eq!(diag["detail"]["circles"], serde_json::json!([0, 1]));
}

#[test]
fn verify_nested_example_passes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.json", NESTED);
    let report = dir.path().join("report.json");
    let o = run(&["verify", "--input", s(&input), "--output", s(&report)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    assert_eq!(r["cycles"].as_array().unwrap().len(), 2);
}

#[test]
fn perturbed_field_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let c = ConfigFile::from_json(SINGLE).unwrap().into_configuration().unwrap();
    let mut v = build_field(&c, Mode::T, BuildOptions::default()).unwrap();
    v.p = &v.p + &Poly::one();
    let input = write(dir.path(), "field.json", &FieldFile::from_field(&v).to_json());
    let o = run(&["verify", "--input", s(&input)]);
    assert_eq!(code(&o), 2);
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pass"], false);
}

#[test]
fn opposite_stability_without_helpers_fails() {
    let dir = tempfile::tempdir().unwrap();
    let c = r#"{"cycles": [{"center": ["0", "0"], "radius": "1", "period": 3.14, "multiplicity": 2, "stability": 1}]}"#;
    let input = write(dir.path(), "c.json", c);
    assert_eq!(code(&run(&["verify", "--input", s(&input), "--mode", "tm"])), 2);
    let fixed = c.replace(r#""stability": 1"#, r#""stability": -1"#);
    let input = write(dir.path(), "ok.json", &fixed);
    assert_eq!(code(&run(&["verify", "--input", s(&input), "--mode", "tm"])), 0);
}

#[test]
fn missing_input_and_bad_tolerances_are_invalid() {
    assert_eq!(code(&run(&["verify", "--input", "/nonexistent/field.json"])), 3);
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.json", SINGLE);
    assert_eq!(code(&run(&["verify", "--input", s(&input), "--tol-ode", "1e-3"])), 3);
    assert_eq!(code(&run(&["verify", "--input", s(&input), "--tol-report", "1e-15"])), 3);
    assert_eq!(code(&run(&["build", "--input", s(&input), "--mode", "bogus"])), 3);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.json", SINGLE);
    let mut outputs = Vec::new();
    for i in 0..2 {
        let field = dir.path().join(format!("field{i}.json"));
        let report = dir.path().join(format!("report{i}.json"));
        let svg = dir.path().join(format!("p{i}.svg"));
        assert_eq!(code(&run(&["build", "--input", s(&input), "--output", s(&field)])), 0);
        assert_eq!(code(&run(&["verify", "--input", s(&field), "--output", s(&report)])), 0);
        assert_eq!(code(&run(&["portrait", "--input", s(&field), "--output", s(&svg)])), 0);
        outputs.push([fs::read(&field).unwrap(), fs::read(&report).unwrap(), fs::read(&svg).unwrap()]);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn portrait_of_full_mode_marks_helpers() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.json", SINGLE);
    let o = run(&["portrait", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<metadata>") && svg.contains("stroke-dasharray"));
}
