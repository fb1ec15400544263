use std::process::{Command, Output};

use serde_json::Value;

fn qlimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlimit"))
        .args(args)
        .env_remove("QLIMIT_CAP")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = qlimit(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn measure_all_nand() {
    let v = json(&["measure", "--fn", "catalog:NAND2", "--all"]);
    let get = |name: &str| {
        v["result"]["measures"]
            .as_array()
            .unwrap()
            .iter()
            .find(|m| m["measure"] == name)
            .map(|m| m["value"].as_str().unwrap().to_string())
    };
    for m in ["C", "D", "s", "bs", "fbs", "deg", "R0"] {
        assert_eq!(get(m).as_deref(), Some("2"), "{m}");
    }
    assert!(v["result"]["measures"].as_array().unwrap().iter().all(|m| m["verified"] == true));
}

#[test]
fn reduce_identity_into_pror() {
    let v = json(&["reduce", "--from", "catalog:I", "--to", "catalog:PrOR:3", "--mode", "weak"]);
    assert_eq!(v["result"]["decision"], "Reducible");
    let dir = std::env::temp_dir().join(format!("qlimit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("w.json");
    std::fs::write(&path, v["result"]["witness"].to_string()).unwrap();
    let checked = json(&["reduce", "--witness", path.to_str().unwrap()]);
    assert_eq!(checked["result"]["verified"], true);
    let report = dir.join("report.json");
    let out = qlimit(&["reduce", "--from", "I", "--to", "PrOR3", "--out", report.to_str().unwrap()]);
    assert!(out.status.success());
    let checked = json(&["reduce", "--witness", report.to_str().unwrap()]);
    assert_eq!(checked["result"]["verified"], true);
}

#[test]
fn limit_sequence_csv() {
    let out = qlimit(&["limit", "--fn", "catalog:NAND2", "--measure", "D", "--kmax", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values, ["2", "4", "8", "16"]);
}

#[test]
fn cap_exhaustion_exit_code() {
    let out = Command::new(env!("CARGO_BIN_EXE_qlimit"))
        .args(["limit", "--fn", "catalog:NAND2", "--measure", "C", "--kmax", "4"])
        .env("QLIMIT_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = qlimit(&["compose", "--fn", "catalog:NAND2", "--k", "5", "--cap", "64"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parse_errors_report_position() {
    let dir = std::env::temp_dir().join(format!("qlimit-parse-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.txt");
    std::fs::write(&path, "n=2\n01 1\n10 7\n").unwrap();
    let out = qlimit(&["measure", "--fn", &format!("file:{}", path.display()), "--measure", "C"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn compose_round_trips_through_files() {
    let out = qlimit(&["compose", "--outer", "catalog:S", "--inner", "catalog:NAND2"]);
    assert!(out.status.success());
    let dir = std::env::temp_dir().join(format!("qlimit-compose-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("snand.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let v = json(&["reduce", "--switchable", path.to_str().unwrap()]);
    assert_eq!(v["result"]["switchability"], "StronglySwitchable");
}

#[test]
fn replay_is_byte_identical() {
    let args = ["simulate", "--fn", "catalog:NAND2", "--evaluator", "directional-nand", "--kmax", "4", "--trials", "50", "--seed", "9"];
    let a = qlimit(&args);
    let b = qlimit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let argv: Vec<String> = v["header"]["argv"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
    let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert_eq!(qlimit(&argv).stdout, a.stdout);
}

#[test]
fn transcript_lines() {
    let out = qlimit(&["simulate", "--fn", "catalog:NAND2", "--evaluator", "nand", "--k", "3", "--seed", "5", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let events: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(events.last().unwrap()["event"], "output");
    assert!(events.iter().all(|e| ["query", "estimate", "retry", "output"].contains(&e["event"].as_str().unwrap())));
}

#[test]
fn selftest_passes() {
    let out = qlimit(&["selftest", "--format", "text"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
