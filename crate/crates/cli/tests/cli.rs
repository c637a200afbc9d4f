use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn wavespec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavespec")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn out_path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn json(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const UNIT_HARMONIC: &str = r#"{ "beta": 2.0, "harmonics": [{ "n": 1, "re": 1.0, "im": 0.0 }] }"#;
const HAND_DATA: &str = r#"{
  "normalizing_numbers": [
    { "n": 1, "re": -1.0, "im": 0.0 },
    { "n": 2, "re": -0.5, "im": 0.0 },
    { "n": 3, "re": -0.08333333333333333, "im": 0.0 }
  ],
  "c12": { "asymptote": { "re": -1.5, "im": 0.0 } }
}"#;

#[test]
fn forward_on_zero_potential() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "zero.json", r#"{ "beta": 2.0, "harmonics": [] }"#);
    let output = out_path(&dir, "spectrum.json");
    let run = wavespec(&["forward", "--input", &input, "--output", &output, "--cutoff", "2"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&output);
    assert_eq!(doc["eigenvalues"].as_array().unwrap().len(), 0);
    let values: Vec<f64> = doc["singularities"].as_array().unwrap().iter().map(|s| s["value"].as_f64().unwrap()).collect();
    assert_eq!(values, [0.25, 0.5, 0.5, 1.0]);
}

#[test]
fn dumped_table_matches_hand_values() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q.json", UNIT_HARMONIC);
    let table = out_path(&dir, "table.json");
    let run = wavespec(&[
        "forward", "--input", &input, "--output", &out_path(&dir, "s.json"), "--truncation", "3", "--cutoff", "2",
        "--dump-vtable", &table,
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&table);
    assert_eq!(doc["A"], 3);
    let want = [(1, 1, -1.0), (1, 2, 0.5), (2, 2, -0.5), (1, 3, -1.0 / 12.0), (2, 3, 1.0 / 6.0), (3, 3, -1.0 / 12.0)];
    for (n, alpha, v) in want {
        let entry = doc["entries"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["n"] == n && e["alpha"] == alpha)
            .expect("entry present");
        assert!((entry["re"].as_f64().unwrap() - v).abs() < 1e-14);
        assert!(entry["im"].as_f64().unwrap().abs() < 1e-14);
    }
}

#[test]
fn malformed_input_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.json", r#"{ "beta": 2.0, "harmonics": [ "#);
    let output = out_path(&dir, "out.json");
    let run = wavespec(&["forward", "--input", &input, "--output", &output]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!Path::new(&output).exists());
    assert!(String::from_utf8_lossy(&run.stderr).contains("parsing"));
}

#[test]
fn unit_speed_ratio_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "b1.json", r#"{ "beta": 1.0, "harmonics": [] }"#);
    assert_eq!(wavespec(&["forward", "--input", &input]).status.code(), Some(2));
}

#[test]
fn inverse_on_hand_data() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.json", HAND_DATA);
    let output = out_path(&dir, "q.json");
    let run = wavespec(&["inverse", "--input", &input, "--output", &output]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc = json(&output);
    assert_eq!(doc["beta"].as_f64(), Some(2.0));
    let h = doc["harmonics"].as_array().unwrap();
    assert!((h[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    for e in &h[1..] {
        assert!(e["re"].as_f64().unwrap().abs() < 1e-12 && e["im"].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn inverse_on_zero_data() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "zero.json",
        r#"{ "normalizing_numbers": [{ "n": 1, "re": 0.0, "im": 0.0 }], "c12": { "asymptote": { "re": -2.0, "im": 0.0 } } }"#,
    );
    let run = wavespec(&["inverse", "--input", &input]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(doc["beta"].as_f64(), Some(3.0));
    assert!(doc["harmonics"].as_array().unwrap().iter().all(|e| e["re"] == 0.0 && e["im"] == 0.0));
}

#[test]
fn impossible_asymptote_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = write(
        &dir,
        "pos.json",
        r#"{ "normalizing_numbers": [{ "n": 1, "re": -1.0, "im": 0.0 }], "c12": { "asymptote": { "re": 1.0, "im": 0.0 } } }"#,
    );
    let output = out_path(&dir, "q.json");
    let run = wavespec(&["inverse", "--input", &input, "--output", &output]);
    assert!(matches!(run.status.code(), Some(2 | 3)), "{:?}", run.status);
    assert!(!Path::new(&output).exists());
    assert!(String::from_utf8_lossy(&run.stderr).contains("error"));
}

#[test]
fn validate_is_deterministic() {
    let a = wavespec(&["validate", "--seed", "7"]);
    let b = wavespec(&["validate", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
    assert!(matches!(a.status.code(), Some(0 | 1)));
}

#[test]
fn validate_flags_a_short_truncation() {
    let run = wavespec(&["validate", "--seed", "7", "--truncation", "4"]);
    assert_eq!(run.status.code(), Some(1));
    let text = String::from_utf8_lossy(&run.stdout);
    let row = text.lines().find(|l| l.starts_with("truncation ")).expect("truncation row");
    assert!(row.contains("FAIL"), "{row}");
}

#[test]
fn roundtrip_passes_on_unit_harmonic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q.json", UNIT_HARMONIC);
    let run = wavespec(&["roundtrip", "--input", &input]);
    let text = String::from_utf8_lossy(&run.stdout);
    assert_eq!(run.status.code(), Some(0), "{text}");
    assert!(text.contains("summary: 3 PASS, 0 FAIL"), "{text}");
}

#[test]
fn grid_csv_has_header_and_all_nodes() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q.json", UNIT_HARMONIC);
    let grid = out_path(&dir, "grid.csv");
    let run = wavespec(&[
        "forward", "--input", &input, "--output", &out_path(&dir, "s.json"), "--cutoff", "2",
        "--grid", "-1,1,0.1,1,3,4", "--grid-output", &grid,
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(&grid).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_lambda,im_lambda,re_c12,im_c12"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn resolvent_grid_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q.json", UNIT_HARMONIC);
    let run = wavespec(&["resolvent", "--input", &input, "--lambda", "0.3,0.7", "--span", "-1,1,3"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let doc: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(doc["sector"], "upper");
    let k = doc["kernel"].as_array().unwrap();
    assert_eq!(k.len(), 3);
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(k[i][j], k[j][i]);
        }
    }
}

#[test]
fn real_lambda_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q.json", UNIT_HARMONIC);
    assert_eq!(wavespec(&["resolvent", "--input", &input, "--lambda", "0.5,0"]).status.code(), Some(2));
}
