use std::process::Command;

use serde_json::Value;

fn daha(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_daha")).args(args).output().expect("runs");
    let code = out.status.code().unwrap_or(-1);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn rootinfo_b3() {
    let (code, v) = daha(&["rootinfo", "--type", "B", "--rank", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["result"]["vartheta"], "a1+a2+a3");
    assert_eq!(v["result"]["minuscule"], serde_json::json!(["w3"]));
    assert_eq!(v["config"]["family"], "B");
}

#[test]
fn verify_a1_passes() {
    let (code, v) = daha(&["verify", "--identity", "a1", "--q", "0.3", "--k=-0.7", "--f", r#"[{"exp":[1],"re":1,"im":0}]"#]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["pass"], true);
    assert!(v["result"]["delta"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn residual_points_a3() {
    let (code, v) = daha(&["residual-points", "--type", "A", "--rank", "3", "--order", "1,2,3", "--mmax", "2"]);
    assert_eq!(code, 0);
    let labels: Vec<Value> = v["result"]["families"].as_array().unwrap().iter().map(|f| f["labels"].clone()).collect();
    let want: Vec<Value> = [[7, 10, 12], [7, 11, 2], [8, 1, 12], [8, 11, 4], [9, 1, 4], [9, 10, 2]]
        .iter()
        .map(|l| serde_json::json!(l))
        .collect();
    assert_eq!(labels, want);
}

#[test]
fn unsupported_strip_exits_3() {
    let (code, v) = daha(&["verify", "--identity", "a2", "--k=-1.7"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "UnsupportedStrip");
}

#[test]
fn parse_errors_are_nonzero() {
    let (code, _) = daha(&["verify", "--identity", "a1", "--k=abc"]);
    assert_eq!(code, 2);
    let (code, _) = daha(&["verify", "--identity", "nope"]);
    assert_ne!(code, 0);
    let (code, _) = daha(&["ct", "--f", "not json"]);
    assert_eq!(code, 2);
}

#[test]
fn replay_reproduces_report() {
    let dir = std::env::temp_dir().join(format!("daha-replay-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_daha"))
        .args(["ct", "--f", r#"[{"exp":[1,1],"re":1,"im":0.5}]"#, "--k", "0.41+0.2i", "--q", "0.35"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let path = dir.join("report.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let again = Command::new(env!("CARGO_BIN_EXE_daha")).args(["replay", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn plot_data_writes_csv() {
    let dir = std::env::temp_dir().join(format!("daha-plot-{}", std::process::id()));
    let (code, v) = daha(&["plot-data", "--out-dir", dir.to_str().unwrap(), "--radius", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["lattice_points"], 49);
    let sector = std::fs::read_to_string(dir.join("sector.csv")).unwrap();
    assert!(sector.lines().any(|l| l.starts_with("0,1,true")));
    assert!(sector.lines().any(|l| l.starts_with("0,0,false")));
    let arrows = std::fs::read_to_string(dir.join("arrows.csv")).unwrap();
    assert!(arrows.lines().any(|l| l.starts_with("thick,")));
    assert!(arrows.lines().any(|l| l.starts_with("thin,")));
}

#[test]
fn macdonald_eigen_residual_small() {
    let (code, v) = daha(&["macdonald", "--type", "A", "--rank", "2", "--b=1,-1", "--q", "0.4"]);
    assert_eq!(code, 0);
    assert!(v["result"]["eigen_residual"].as_f64().unwrap() < 1e-10);
}
