use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("indlab-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn indlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indlab"))
        .args(args)
        .output()
        .unwrap()
}

fn run_config(name: &str, json: &str) -> (Output, PathBuf) {
    let dir = scratch(name);
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, json).unwrap();
    let out = dir.join("out");
    let o = indlab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    (o, out)
}

fn report(out: &PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn malformed_group_is_a_config_error() {
    let (o, _) = run_config(
        "badgroup",
        r#"{ "system": { "group": { "free": "two" } } }"#,
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn unknown_field_is_rejected() {
    let (o, _) = run_config("unknown", r#"{ "sytem": {} }"#);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_task_list_echoes_config() {
    let (o, out) = run_config("empty", r#"{ "tasks": [], "seed": 5 }"#);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["tasks"].as_array().unwrap().len(), 0);
    assert_eq!(r["seed"], 5);
    assert!(r["config"].is_object());
}

#[test]
fn failed_expectation_exits_one() {
    let (o, out) = run_config(
        "expect",
        r#"{ "system": { "group": { "free-abelian": 1 } },
             "regions": [ { "balls": [1, 2] } ],
             "tasks": [ { "task": "entropy", "cover": "value-partition", "expect_min_ratio": [3, "1"] } ] }"#,
    );
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&out)["tasks"][0]["status"], "fail");
}

#[test]
fn oversized_region_is_a_budget_stop() {
    let (o, out) = run_config(
        "budget",
        r#"{ "regions": [ { "balls": [3] } ], "budgets": { "max_region": 10 },
             "tasks": [ { "task": "entropy", "cover": "value-partition" } ] }"#,
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(&out)["tasks"][0]["status"], "budget");
}

#[test]
fn csv_headers_carry_bounds() {
    let (o, out) = run_config(
        "csv",
        r#"{ "system": { "group": { "free-abelian": 1 } }, "regions": [ { "balls": [0, 1] } ],
             "tasks": [ { "task": "entropy", "cover": "value-partition" } ] }"#,
    );
    assert_eq!(o.status.code(), Some(0));
    let csv: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(!csv.is_empty());
    let header = std::fs::read_to_string(&csv[0]).unwrap();
    assert!(
        header.lines().next().unwrap().contains("[upper]"),
        "{header}"
    );
    assert!(out.join("timings.json").exists());
}

#[test]
fn explain_and_scenarios() {
    let o = indlab(&["explain", "entropy.ratio"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!o.stdout.is_empty());
    let o = indlab(&["explain", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("entropy.ratio"));
    let o = indlab(&["list-scenarios"]);
    let listed = String::from_utf8_lossy(&o.stdout).into_owned();
    for name in ["no-orbit-ie", "family-vs-single", "xa1-entropy"] {
        assert!(listed.contains(name), "{listed}");
    }
    let out = scratch("scenario").join("out");
    let o = indlab(&[
        "run",
        "--scenario",
        "no-orbit-ie",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}
