use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_impurity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn catalog_reports_g_and_axioms() {
    let v = json_ok(&["catalog", "--fn", "gini"]);
    let g = &v["functions"][0]["G"];
    assert!((g["min"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert!((g["max"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert_eq!(g["respects_class_weighting"], true);

    let v = json_ok(&["catalog", "--fn", "cost-insensitive:0.3"]);
    assert_eq!(v["functions"][0]["cost_insensitive"], true);

    let v = json_ok(&["catalog", "--fn", "quartic-degenerate"]);
    assert_eq!(v["functions"][0]["proper"], false);
    assert_eq!(v["functions"][0]["preimpurity"], false);
}

#[test]
fn split_scores_match_chord() {
    let v = json_ok(&["split", "--fn", "gini", "--c", "0.4", "--candidates", "0.1:0.6,0.25:0.75"]);
    // chord of 2p(1-p) through a and b, evaluated at c
    let chord = |a: f64, b: f64| {
        let f = |p: f64| 2.0 * p * (1.0 - p);
        ((b - 0.4) * f(a) + (0.4 - a) * f(b)) / (b - a)
    };
    let cands = v["candidates"].as_array().unwrap();
    assert!((cands[0]["impurity"].as_f64().unwrap() - chord(0.1, 0.6)).abs() < 1e-12);
    assert!((cands[1]["impurity"].as_f64().unwrap() - chord(0.25, 0.75)).abs() < 1e-12);
    assert_eq!(v["winner"]["index"], 0);
}

#[test]
fn purer_function_picks_purer_right_child() {
    // two splits of one node, the second with the purer right child
    let cands = "0.3:0.6,0.1:0.5";
    let winner = |f: &str| json_ok(&["split", "--fn", f, "--c", "0.4", "--candidates", cands])["winner"]["b"]
        .as_f64()
        .unwrap();
    assert!(winner("power-minus:3") >= winner("gini"));
}

#[test]
fn compare_orders_cube_over_gini() {
    let v = json_ok(&["compare", "--f", "power-minus:3", "--g", "gini", "--trials", "500"]);
    assert_eq!(v["relation"], "f-more-positively-pure");
    assert_eq!(v["empirical"]["report"]["passed"], true);
}

#[test]
fn transform_raw_spec() {
    assert_eq!(stdout(&["transform", "--fn", "gini", "--w", "2", "--raw"]).trim(), "tw:2:gini");
}

#[test]
fn plotdata_rows() {
    let text = stdout(&["plotdata", "--fn", "gini", "--c", "0.4", "--splits", "0.2:0.6,0.1:0.9"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,p,f,a,fa,b,fb,c,chord"));
    let chords: Vec<&str> = text.lines().filter(|l| l.starts_with("chord,")).collect();
    assert_eq!(chords.len(), 2);
    let cells: Vec<&str> = chords[0].split(',').collect();
    assert_eq!(cells[3].parse::<f64>().unwrap(), 0.2);
    assert_eq!(cells[5].parse::<f64>().unwrap(), 0.6);
}

#[test]
fn realize_prevalences_round_trip() {
    let text = stdout(&["realize", "--c", "0.4", "--s1", "0.2:0.6", "--s2", "0.3:0.5"]);
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let (mut w, mut pos) = ([0.0f64; 4], [0.0f64; 4]); // left, right, upper, lower
    for r in rd.records() {
        let r = r.unwrap();
        let class: u8 = r[1].parse().unwrap();
        let weight: f64 = r[2].parse().unwrap();
        let x: f64 = r[3].parse().unwrap();
        let y: f64 = r[4].parse().unwrap();
        let sides = [x < 0.0, x > 0.0, y > 0.0, y < 0.0];
        for i in 0..4 {
            if sides[i] {
                w[i] += weight;
                pos[i] += weight * class as f64;
            }
        }
    }
    let want = [0.2, 0.6, 0.3, 0.5];
    let got: Vec<f64> = (0..4).map(|i| pos[i] / w[i]).collect();
    for (g, e) in got.iter().zip(want) {
        assert!((g - e).abs() < 1e-10, "{got:?}");
    }
}

#[test]
fn grow_on_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    std::fs::write(&data, "x,y,label,weight\n0,0,0,1\n1,0,0,1\n2,0,1,1\n3,0,1,1\n").unwrap();
    let v = json_ok(&["grow", "--data", data.to_str().unwrap(), "--fn", "gini"]);
    let root = &v["root"];
    assert_eq!(root["axis"], "x");
    assert_eq!(root["threshold"].as_f64().unwrap(), 1.5);
    assert_eq!(root["left"]["c"], 0.0);
    assert_eq!(root["right"]["c"], 1.0);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let printed = stdout(&["-o", out.to_str().unwrap(), "catalog", "--fn", "entropy"]);
    assert!(printed.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["functions"][0]["spec"], "entropy");
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "realizer", "--trials", "50"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(!run(&["verify", "bogus"]).status.success());
}

#[test]
fn config_supplies_flags_and_explicit_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"fn": "gini", "c": 0.4, "candidates": [[0.1, 0.6], [0.25, 0.75]]}"#).unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json_ok(&["--config", cfg, "split"]);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 2);
    let v = json_ok(&["--config", cfg, "split", "--candidates", "0.2:0.5"]);
    assert_eq!(v["candidates"].as_array().unwrap().len(), 1);
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"fn": "gini", "bogus": 1}"#).unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "catalog"]);
    assert!(!out.status.success());
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "usage");
}

#[test]
fn errors_are_json_on_stderr() {
    let out = run(&["split", "--fn", "nope", "--c", "0.4", "--candidates", "0.1:0.6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "unknown-function");

    let out = run(&["transform", "--fn", "gini", "--w", "-1"]);
    assert!(!out.status.success());
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(e["error"]["kind"].is_string());
}

#[test]
fn same_seed_same_bytes() {
    let args = ["--seed", "7", "compare", "--f", "gini", "--g", "entropy", "--trials", "300"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let g = ["--seed", "11", "grow", "--mixture", "two-cluster", "--fn", "entropy", "--max-depth", "3"];
    assert_eq!(run(&g).stdout, run(&g).stdout);
    let v = json_ok(&g);
    assert_eq!(v["seed"], 11);
}
