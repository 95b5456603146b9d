use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn czset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_czset")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("czset-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const UNIT_BOX: &str = r#"{"type": "czono", "G": [[1, 0], [0, 1]], "c": [0, 0]}"#;

#[test]
fn pdiff_exit_codes() {
    let d = scratch("pdiff");
    let c = write(&d, "c.json", UNIT_BOX);
    let small = write(&d, "s.json", r#"{"type": "zonotope", "G": [[0.3, 0], [0, 0.3]], "c": [0, 0]}"#);
    let big = write(&d, "b.json", r#"{"type": "zonotope", "G": [[1.5, 0], [0, 1.5]], "c": [0, 0]}"#);
    let ball = write(&d, "e.json", r#"{"type": "ellipsoid", "G": [[0.1, 0], [0, 0.1]], "c": [0, 0]}"#);

    let out = d.join("k.json");
    let o = czset(&["pdiff", &c, &small, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let k = json(&out);
    assert_eq!(k["G"], serde_json::json!([[0.7, 0.0], [0.0, 0.7]]));
    assert_eq!(json(&d.join("k.meta.json"))["empty"], false);

    let out = d.join("e.json.out");
    let o = czset(&["pdiff", &c, &big, "--mode", "outer", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&d.join("e.json.meta.json"))["empty"], true);

    let o = czset(&["pdiff", &c, &ball, "--mode", "two-stage", "--out", d.join("t.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("two-stage requires zonotope"));
}

#[test]
fn rc_zero_horizon_writes_the_goal() {
    let d = scratch("rc0");
    let goal = r#"{"type": "czono", "G": [[0.5, 0.1], [0, 0.4]], "c": [0.1, 0]}"#;
    let cfg = format!(
        r#"{{"model": {{"A": [[1, 0.1], [0, 1]], "B": [[0], [0.1]], "U": {{"type": "zonotope", "G": [[1]], "c": [0]}},
        "W": {{"type": "ellipsoid", "G": [[0.01, 0], [0, 0.01]], "c": [0, 0]}},
        "X": {{"type": "hpoly", "H": [[1, 0], [-1, 0], [0, 1], [0, -1]], "k": [2, 2, 2, 2]}},
        "G": {goal}}}, "variant": "B", "T": 0}}"#
    );
    let cfg = write(&d, "rc.json", &cfg);
    let out = d.join("out");
    let o = czset(&["rc", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let sets: Vec<_> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("K_"))
        .collect();
    assert_eq!(sets, ["K_0.json"]);
    let k = json(&out.join("K_0.json"));
    assert_eq!(k["G"], serde_json::json!([[0.5, 0.1], [0.0, 0.4]]));
    assert_eq!(k["c"], serde_json::json!([0.1, 0.0]));
}

#[test]
fn rc_double_integrator_summary_is_deterministic() {
    let d = scratch("rcdi");
    let cfg = write(&d, "di.json", r#"{"model": "double-integrator", "T": 20, "W": "ellipsoid"}"#);
    let mut summaries = Vec::new();
    for run in ["a", "b"] {
        let out = d.join(run);
        let o = czset(&["rc", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        summaries.push(fs::read_to_string(out.join("summary.csv")).unwrap());
    }
    assert_eq!(summaries[0], summaries[1]);
    let last = summaries[0].lines().last().unwrap();
    assert_eq!(last, "0,120,142,11,false");
    assert!(d.join("a/timings.csv").exists());
}

#[test]
fn bench_chain_rows() {
    let d = scratch("bench");
    let out = d.join("bench.csv");
    let o = czset(&["bench-chain", "--masses", "2..5", "-T", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "masses,n,seconds,M,N,dof,empty");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("2,4,"));

    let o = czset(&["bench-chain", "--masses", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_compare_needs_a_planar_model() {
    let d = scratch("cmp");
    let cfg = write(&d, "chain.json", r#"{"model": "chain", "masses": 2, "T": 3}"#);
    let o = czset(&["oracle-compare", &cfg, "--out", d.join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n = 2"));
}

#[test]
fn oracle_compare_small_scenario() {
    let d = scratch("cmp2");
    let cfg = write(&d, "r.json", r#"{"model": "random-2d", "T": 2, "seed": 4, "methods": ["inner"]}"#);
    let out = d.join("o");
    let o = czset(&["oracle-compare", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("ratios.csv")).unwrap();
    let rows: Vec<_> = text.lines().collect();
    assert_eq!(rows[0], "method,area,area_upper,ratio,M,N,dof");
    assert!(rows[1].starts_with("exact,"));
    let ratio: f64 = rows[2].split(',').nth(3).unwrap().parse().unwrap();
    assert!(ratio > 0.0 && ratio <= 1.0 + 1e-6);
}

#[test]
fn bad_inputs_name_the_field() {
    let d = scratch("bad");
    let cfg = write(&d, "bad.json", r#"{"model": "double-integrator", "T": "twenty"}"#);
    let o = czset(&["rc", &cfg, "--out", d.join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("field `T`"));

    let c = write(&d, "c.json", r#"{"type": "czono", "G": [[1, 0], [0]], "c": [0, 0]}"#);
    let s = write(&d, "s.json", r#"{"type": "zonotope", "G": [[0.1, 0], [0, 0.1]], "c": [0, 0]}"#);
    let o = czset(&["pdiff", &c, &s, "--out", d.join("k.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("G[1]"));
}
