use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmdecomp")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn code(args: &[&str]) -> Option<i32> {
    run(args).status.code()
}

fn temp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cmdecomp-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn reduce_prints_form_and_map() {
    let text = stdout(&["reduce", "--form", "4,5,3"]);
    assert!(text.starts_with("[2,-1,3]\n"), "{text}");
    assert!(text.contains("map"));
}

#[test]
fn class_numbers_agree_both_ways() {
    assert_eq!(stdout(&["classnumber", "--dk", "-3", "--f", "60"]).trim(), "36");
    assert_eq!(stdout(&["classnumber", "--disc", "-10800"]).trim(), "36");
}

#[test]
fn classgroup_json() {
    let v = json(&["classgroup", "--disc", "-23"]);
    assert_eq!(v["h"], 3);
    assert_eq!(v["structure"], serde_json::json!([3]));
    assert_eq!(v["forms"], serde_json::json!([[1, 1, 6], [2, -1, 3], [2, 1, 3]]));
}

#[test]
fn decompose_reports_buckets() {
    let v = json(&["decompose", "--n", "6", "--form", "1,0,3"]);
    assert_eq!(v["delta_tilde"], 24);
    assert_eq!(v["predicted"], 24);
    assert_eq!(v["by_conductors"].as_array().unwrap().len(), 4);
    assert_eq!(v["pairs"].as_array().unwrap().len(), 24);
    let both = run(&["decompose", "--n", "4", "--form", "1,0,1", "--method", "both"]);
    assert_eq!(both.status.code(), Some(0));
}

#[test]
fn composition_commands() {
    let v = json(&["compose", "--form1", "2,1,3", "--form2", "2,1,3"]);
    assert_eq!(v["form"], serde_json::json!([2, -1, 3]));
    assert_eq!(code(&["gcompose", "--form1", "1,0,1", "--form2", "1,0,4"]), Some(0));
    assert!(stdout(&["lift", "--form", "2,1,3", "--disc", "-92"]).contains("[3,-2,8]"));
    assert_eq!(json(&["stab", "--disc", "-144", "--sub", "-16", "--sub2", "-36"])["order"], 2);
}

#[test]
fn tlattice_round_trip() {
    let v = json(&["tlattice", "--surface", "6,0,18"]);
    assert_eq!(v["form"], serde_json::json!([6, 0, 18]));
    assert_eq!(v["content"], 6);
    let v = json(&["tlattice", "--form1", "1,1,1", "--form2", "1,1,1", "--scale2", "2"]);
    assert_eq!(v["gram"], serde_json::json!([[4, 2], [2, 4]]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["reduce", "--form", "1,0,1"]), Some(0));
    // Not positive definite, not a discriminant, and a mismatching sweep are mathematical failures.
    assert_eq!(code(&["reduce", "--form", "1,0,-1"]), Some(1));
    assert_eq!(code(&["classgroup", "--disc", "-6"]), Some(1));
    assert_eq!(code(&["verify-ma", "--dk", "-12", "--f0-max", "1", "--n-max", "2"]), Some(1));
    assert_eq!(code(&["reduce", "--form", "1,0"]), Some(2));
    assert_eq!(code(&["decompose", "--n", "2"]), Some(2));
    assert_eq!(code(&["no-such-command"]), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["--json", "verify-ma", "--dk", "-3", "--dk", "-7", "--f0-max", "2", "--n-max", "4"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["shioda-inose", "--n", "2", "--form", "1,1,1", "--digits", "20"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn verify_ma_csv_and_config() {
    let text = stdout(&["verify-ma", "--dk", "-4", "--f0-max", "1", "--n-max", "3"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d_K,f0,Q0,n,delta_tilde,predicted,formula,match"));
    assert_eq!(lines.count(), 3);

    let dir = temp_dir("cfg");
    let cfg = dir.join("sweep.toml");
    let out = dir.join("sweep.json");
    std::fs::write(&cfg, format!("d_k = [-7, -8]\nf0_max = 2\nn_max = 3\nmethod = \"both\"\nformat = \"json\"\noutput = {:?}\n", out)).unwrap();
    assert_eq!(code(&["verify-ma", "--config", cfg.to_str().unwrap()]), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!v["rows"].as_array().unwrap().is_empty());
    assert_eq!(v["mismatches"], 0);

    std::fs::write(&cfg, "d_k = [-7]\nbogus = 1\n").unwrap();
    assert_eq!(code(&["verify-ma", "--config", cfg.to_str().unwrap()]), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn verify_sum_outcomes() {
    assert!(stdout(&["verify-sum", "--dk", "-3", "--f0", "2", "--n", "6"]).starts_with("holds: 24 = 24"));
    assert!(stdout(&["verify-sum", "--dk", "-4", "--f0", "1", "--n", "6"]).starts_with("skipped"));
}

#[test]
fn shioda_inose_models() {
    let v = json(&["shioda-inose", "--n", "6", "--form", "1,0,3"]);
    let models = v["models"].as_array().unwrap();
    assert_eq!(models.len(), 12);
    for m in models {
        assert!(m["fibration"].as_str().unwrap().starts_with("y^2 = x^3 - 3*("));
        assert!(m["A"]["re"].is_string());
    }
    let text = stdout(&["shioda-inose", "--n", "1", "--form", "1,0,1", "--digits", "10"]);
    assert!(text.contains("2982529"), "{text}");
}
