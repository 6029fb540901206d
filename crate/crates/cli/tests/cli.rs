use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const PATH3: &str = r#"{"vertices":[{"id":0,"c":0,"m":1},{"id":1,"c":0,"m":1},{"id":2,"c":0,"m":1}],
"edges":[{"u":0,"v":1,"b":1},{"u":1,"v":2,"b":1}]}"#;
const RAY_CUBIC: &str = r#"{"kind":"ray","weight_law":{"type":"poly","power":3.0,"scale":1.0},
"measure_law":{"type":"const","value":1.0},"killing_law":{"type":"const","value":0.0}}"#;
const RAY_CONST: &str = r#"{"kind":"ray","weight_law":{"type":"const","value":1.0}}"#;
const ASYMMETRIC: &str = r#"{"vertices":[{"id":"a","c":0,"m":1},{"id":"b","c":0,"m":1}],
"edges":[{"u":"a","v":"b","b":1},{"u":"b","v":"a","b":2}]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn graphlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_graphlap")).args(args).env_remove("GRAPHLAP_THREADS").output().unwrap()
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice::<Value>(&out.stdout).unwrap()["report"].clone()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn spectrum_of_path_section() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "path3.json", PATH3);
    let r = report(&graphlap(&["spectrum", "--graph", s(&g), "--section", "0,1"]));
    let ev: Vec<f64> = serde_json::from_value(r["spectral"]["eigenvalues"].clone()).unwrap();
    assert!((ev[0] - 0.3820).abs() < 1e-4 && (ev[1] - 2.6180).abs() < 1e-4, "{ev:?}");
}

#[test]
fn normalized_measure_has_unit_degrees() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "path3.json", PATH3);
    let r = report(&graphlap(&["spectrum", "--graph", s(&g), "--measure", "n"]));
    for d in r["d"].as_array().unwrap() {
        assert!((d.as_f64().unwrap() - 1.0).abs() < 1e-15);
    }
}

#[test]
fn missing_file_exits_2() {
    let out = graphlap(&["spectrum", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_graph_exits_2() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.json", ASYMMETRIC);
    assert_eq!(graphlap(&["spectrum", "--graph", s(&g)]).status.code(), Some(2));
    assert_eq!(graphlap(&["verify", "--graph", s(&g)]).status.code(), Some(2));
}

#[test]
fn verify_random_passes() {
    let out = graphlap(&["verify", "--instances", "200", "--max-vertices", "12"]);
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["properties"].as_array().unwrap().len(), 13);
}

#[test]
fn verify_flags_asymmetric_input() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "bad.json", ASYMMETRIC);
    let out = graphlap(&["verify", "--graph", s(&g), "--allow-invalid"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["properties"][0]["property"], "symmetry");
    assert_eq!(v["report"]["properties"][0]["verdict"], "FAIL");
}

#[test]
fn verify_only_filter() {
    let r = report(&graphlap(&["verify", "--only", "coarea", "--instances", "20"]));
    let props = r["properties"].as_array().unwrap();
    assert_eq!(props.len(), 1);
    assert_eq!(props[0]["property"], "coarea");
}

#[test]
fn stochastic_verdicts() {
    let dir = TempDir::new().unwrap();
    let ray = write(&dir, "ray_cubic.json", RAY_CUBIC);
    let g = write(&dir, "finite.json", PATH3);
    assert_eq!(report(&graphlap(&["stochastic", "--family", s(&ray)]))["verdict"], "SI");
    assert_eq!(report(&graphlap(&["stochastic", "--graph", s(&g)]))["verdict"], "SC");
}

#[test]
fn stochastic_echoes_rule() {
    let dir = TempDir::new().unwrap();
    let ray = write(&dir, "ray_cubic.json", RAY_CUBIC);
    let args = ["stochastic", "--family", s(&ray), "--radii", "8,16,32", "--tol", "1e-7", "--window", "2"];
    let r = report(&graphlap(&args));
    assert_eq!(r["rule"]["tol"], 1e-7);
    assert_eq!(r["rule"]["window"], 2);
    assert_eq!(r["v_sequence"]["sections"].as_array().unwrap().len(), 3);
}

#[test]
fn essential_sequence_decreases() {
    let dir = TempDir::new().unwrap();
    let ray = write(&dir, "ray_const.json", RAY_CONST);
    let r = report(&graphlap(&["essential", "--family", s(&ray), "--delete-radius", "5", "--outer", "10,20,40"]));
    let seq: Vec<f64> = serde_json::from_value(r["sequence"].clone()).unwrap();
    assert_eq!(seq.len(), 3);
    assert!(seq.windows(2).all(|w| w[1] < w[0]), "{seq:?}");
    assert!(seq[2] < 0.01);
}

#[test]
fn simulate_summary_and_determinism() {
    let dir = TempDir::new().unwrap();
    let ray = write(&dir, "ray_cubic.json", RAY_CUBIC);
    let args = ["simulate", "--family", s(&ray), "--x0", "0", "--t", "1.0", "--samples", "500", "--seed", "42"];
    let a = graphlap(&args);
    let b = graphlap(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    let n = r["alive"].as_u64().unwrap() + r["killed"].as_u64().unwrap() + r["exploded"].as_u64().unwrap();
    assert_eq!(n, 500);
    assert!(r["exploded"].as_u64().unwrap() > 0);
}

#[test]
fn manifest_and_out_file() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "path3.json", PATH3);
    let out = dir.path().join("report.json");
    let o = graphlap(&["cheeger", "--graph", s(&g), "--out", s(&out)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let m = &v["manifest"];
    assert_eq!(m["command"], "cheeger");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["config"]["budget"], 4096);
    assert_eq!(v["report"]["alpha_m"]["kind"], "exact");
}

#[test]
fn threads_flag_and_env() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "path3.json", PATH3);
    let o = graphlap(&["--threads", "1", "heat", "--graph", s(&g), "--radii", "1,2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["manifest"]["threads"], 1);
    let o = Command::new(env!("CARGO_BIN_EXE_graphlap"))
        .args(["coarea", "--graph", s(&g), "--function", s(&write(&dir, "f.json", r#"{"1": 2.0}"#))])
        .env("GRAPHLAP_THREADS", "1")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["manifest"]["threads"], 1);
    assert!(v["report"]["first_relative_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "path3.json", PATH3);
    let args = ["spectrum", "--graph", s(&g), "--section", "0,1,2"];
    assert_eq!(graphlap(&args).stdout, graphlap(&args).stdout);
}
