use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_envelab"))
}

fn out_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn simulate_writes_one_row_per_time() {
    let dir = out_dir("simulate");
    let output = bin()
        .args(["simulate", "--flow", "rotation", "--alpha-preset", "golden"])
        .args(["--horizon", "100", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let csv = fs::read_to_string(dir.join("orbit.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,coord1,coord2,tag"));
    assert_eq!(lines.count(), 101);
}

#[test]
fn semigroup_tags_the_annulus_families() {
    let dir = out_dir("semigroup");
    let output = bin()
        .args(["semigroup", "--flow", "annulus", "--epsilon", "0.2"])
        .args(["--horizon", "500", "--resolution", "8"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("semigroup.json")).unwrap()).unwrap();
    let reps = report["reps"].as_array().unwrap();
    assert!(!reps.is_empty());
    let tags: Vec<&str> = reps.iter().map(|r| r["tag"].as_str().unwrap()).collect();
    assert!(tags.iter().any(|t| t.starts_with("step")), "{tags:?}");
    assert!(
        tags.iter().any(|t| t.starts_with("center-collapse")),
        "{tags:?}"
    );
    // the distance matrix is square over the representatives
    let csv = fs::read_to_string(dir.join("semigroup_distances.csv")).unwrap();
    assert_eq!(csv.lines().count(), reps.len());
}

#[test]
fn detect_reports_a_verdict_and_the_return_set() {
    let dir = out_dir("detect");
    let output = bin()
        .args([
            "detect",
            "--flow",
            "shift-pair",
            "--detector",
            "proximality",
        ])
        .args(["--epsilon", "0.5", "--horizon", "100"])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("detect.json")).unwrap()).unwrap();
    assert_eq!(report["verdict"]["outcome"], "holds");
    let csv = fs::read_to_string(dir.join("returns.csv")).unwrap();
    assert!(csv.starts_with("t,epsilon\n"));
    assert!(csv.lines().count() > 1);
}

#[test]
fn theorems_exits_clean_and_report_rerenders_the_table() {
    let dir = out_dir("theorems");
    let output = bin()
        .args([
            "theorems",
            "--id",
            "levels-isomorphic",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let table = stdout(&output);
    assert!(table.contains("levels-isomorphic"), "{table}");
    assert!(
        table.contains("1 checks: 1 hold, 0 fail, 0 open"),
        "{table}"
    );

    let rerender = bin()
        .arg("report")
        .arg(dir.join("theorems.json"))
        .output()
        .unwrap();
    assert!(rerender.status.success(), "{rerender:?}");
    assert_eq!(stdout(&rerender), table);
}

#[test]
fn unknown_check_id_and_bad_config_fail_loudly() {
    let dir = out_dir("errors");
    let output = bin()
        .args([
            "theorems",
            "--id",
            "no-such-check",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("no-such-check"));

    let cfg = dir.join("bad.toml");
    fs::write(&cfg, "[flow]\nkind = \"rotation\"\nspeed = 3\n").unwrap();
    let output = bin()
        .args(["simulate", "--config", cfg.to_str().unwrap()])
        .args(["--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("speed"));
}
