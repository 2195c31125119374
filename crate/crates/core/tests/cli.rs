use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_greedy-lab"));
    c.env_remove("GREEDY_LAB_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn greedy-lab")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn list_claims() {
    let out = run(&["list-claims"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for id in [
        "L1", "L2", "T21", "T24", "P36", "L38", "T39b", "T310b", "L311", "P313", "P313r", "T314", "T317", "P41a", "P41bc", "P43",
        "T47",
    ] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{id} "))), "{id} missing");
    }
    assert!(text.contains("not checked:"));

    let out = run(&["list-claims", "--filter", "conservative", "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out).as_array().unwrap().len(), 4);

    let out = run(&["list-claims", "--filter", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!stdout(&out).lines().any(|l| l.starts_with('L') || l.starts_with('T') || l.starts_with('P')));
}

#[test]
fn examples_preset() {
    let out = run(&["run", "--preset", "paper-examples"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    let checks = report["examples"]["checks"].as_array().unwrap();
    let value = |space: &str, quantity: &str| {
        checks
            .iter()
            .find(|c| c["space"] == space && c["quantity"] == quantity)
            .unwrap_or_else(|| panic!("{space} {quantity}"))["computed"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(value("spreading:3", "‖1_[1,6]‖"), "2");
    assert_eq!(value("spreading:3", "‖1_[7,12]‖"), "6");
    assert_eq!(value("partial_sum@24", "‖x + 1_A‖"), "30");
    assert_eq!(value("partial_sum@24", "‖x + 1_B‖"), "12");
    assert_eq!(value("dual of spreading:2", "‖1_[3,4]‖*"), "1");
}

#[test]
fn left_property_family() {
    let out = run(&["run", "--claim", "left-property-A", "--space", "partial_sum", "--window", "32"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let bounds: Vec<&str> = report["left_property_a"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["family_bound"]["value"].as_str().unwrap())
        .collect();
    assert_eq!(bounds, ["1", "7/4", "5/2", "13/4"]);
}

#[test]
fn invalid_input_exits_two_and_names_the_field() {
    let out = run(&["run", "--preset", "acceptance", "--window", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`window`"));
    let out = run(&["run", "--preset", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`preset`"));
    let out = run(&["norm", "--space", "spreading:3", "--vector", "13:1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for threads in ["1", "2"] {
        let path = dir.path().join(format!("t{threads}.json"));
        let out = run(&[
            "run", "--claim", "L38", "--claim", "T47", "--space", "spreading:3", "--window", "8", "--samples", "200", "--seed", "3",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        bytes.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn verify_claim_with_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("slacks.csv");
    let out = run(&[
        "verify", "claim", "--id", "L38", "--space", "lp:2", "--window", "10", "--samples", "10000", "--seed", "7", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert!(report["max_slack_f64"].as_f64().unwrap() <= 0.5 + 1e-12);
    let n = report["instances"].as_u64().unwrap() as usize;
    assert_eq!(n, 10_000);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), n + 1);
    assert!(text.starts_with("claim,space,instance,slack"));
}

#[test]
fn seed_comes_from_the_environment() {
    let out = bin()
        .env("GREEDY_LAB_SEED", "11")
        .args(["verify", "claim", "--id", "L38", "--space", "lp:inf", "--window", "6", "--samples", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["seed"], 11);
}

#[test]
fn constants_and_tga() {
    let out = run(&["constants", "estimate", "--space", "spreading:3", "--name", "democracy", "--window", "12"]);
    assert!(out.status.success());
    let est = json(&out);
    assert_eq!(est["value"], "3");
    assert_eq!(est["kind"], "window-exact");

    let out = run(&["tga", "run", "--space", "lp:1", "--vector", "1:1,2:3,3:-1,4:3", "--m", "2"]);
    assert!(out.status.success());
    let r = json(&out);
    assert_eq!(r["choices"][0]["lambda"], "{2,4}");
    assert_eq!(r["choices"][0]["residual_norm"], "2");

    let out = run(&["norm", "--space", "spreading:3", "--vector", "7:1,8:1,9:1,10:1,11:1,12:1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains('6'));
}
