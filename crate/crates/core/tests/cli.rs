use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn toposval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toposval")).args(args).output().expect("binary runs")
}

fn json_report(file: &str, extra: &[&str]) -> (i32, Vec<u8>) {
    let path = scenario(file);
    let mut args = vec![path.to_str().unwrap(), "--output", "-"];
    args.extend_from_slice(extra);
    let out = toposval(&args);
    (out.status.code().unwrap(), out.stdout)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toposval-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn shipped_scenarios_pass() {
    for file in ["q3.json", "c3.json", "ks18.json", "p2_abstract.json"] {
        let out = toposval(&[scenario(file).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&out.stdout));
        let summary = String::from_utf8(out.stdout).unwrap();
        assert!(summary.lines().last().unwrap().contains("tasks passed"));
    }
}

#[test]
fn violations_exit_with_one() {
    let (code, bytes) = json_report("func_violation.json", &[]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report["passed"], false);
    let first = &report["tasks"][0]["violations"][0];
    assert_eq!(first["condition"], "FUNC");
    assert_eq!(first["morphisms"][0], "f");
    assert_eq!(report["tasks"][0]["result"]["checks"]["naturality"]["agree"], true);
}

#[test]
fn bad_input_exits_with_two() {
    let syntax = scratch("syntax.json", "{\n  \"version\": 1,\n  \"tasks\": [\n}");
    let out = toposval(&[syntax.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let unknown = scratch("unknown.json", r#"{"version": 1, "tasks": [], "colour": "red"}"#);
    assert_eq!(toposval(&[unknown.to_str().unwrap()]).status.code(), Some(2));

    let dangling = scratch(
        "dangling.json",
        r#"{"version": 1,
            "quantum": {"operators": [{"name": "A", "diagonal": [1, 2]}]},
            "tasks": [{"task": "verify", "valuation": {"kind": "nu_psi", "state": "nowhere"}}]}"#,
    );
    let out = toposval(&[dangling.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere"));

    assert_eq!(toposval(&["/nonexistent/scenario.json"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    for file in ["q3.json", "c3.json", "ks18.json"] {
        let (_, a) = json_report(file, &[]);
        let (_, b) = json_report(file, &[]);
        assert_eq!(a, b, "{file}");
        assert!(a.ends_with(b"}\n"));
    }
    let target = std::env::temp_dir().join(format!("toposval-cli-out-{}.json", std::process::id()));
    let out = toposval(&[scenario("q3.json").to_str().unwrap(), "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&target).unwrap(), json_report("q3.json", &[]).1);
    std::fs::remove_file(target).ok();
}

#[test]
fn task_filter_selects_by_name_or_kind() {
    let (code, bytes) = json_report("q3.json", &["--task", "nu-psi-plus"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    let tasks = report["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 1);
    assert_eq!(tasks[0]["result"]["values"][0]["sieve"], serde_json::json!(["u"]));

    let (_, bytes) = json_report("q3.json", &["--task", "verify"]);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    let tasks = report["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 4);
    assert!(tasks.iter().all(|t| t["task"] == "verify"));
}

#[test]
fn mode_override_is_reported() {
    let (code, bytes) = json_report("c3.json", &["--mode", "numeric", "--epsilon", "1e-9"]);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(report["mode"], "numeric");
    assert_eq!(report["epsilon"], 1e-9);
}
