use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn linex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linex"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {out:?}"))
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_e0() {
    let out = linex(&["validate", &path("e0.json")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["command"], "validate");
    assert_eq!(r["outcome"], "valid");
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert!(r["elapsed"].is_number());
}

#[test]
fn validate_names_unnormalized_weights() {
    let out = linex(&["validate", &path("bad_weights.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        report(&out)["outcome"]["violations"][0]["kind"],
        "WeightsNotNormalized"
    );
    assert!(!out.stderr.is_empty());
}

#[test]
fn validate_missing_file_is_an_io_error() {
    let out = linex(&["validate", "missing.json"]);
    assert_eq!(out.status.code(), Some(3));
    report(&out);
}

#[test]
fn malformed_json_is_a_parse_error() {
    let dir = std::env::temp_dir().join(format!("linex-bad-{}", std::process::id()));
    std::fs::write(&dir, "{ not json").unwrap();
    let out = linex(&["validate", &dir.to_string_lossy()]);
    std::fs::remove_file(&dir).ok();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn certify_e0() {
    let out = linex(&["certify", &path("e0.json")]);
    assert_eq!(out.status.code(), Some(0));
    let cert = &report(&out)["outcome"];
    assert_eq!(cert["core_value"], "11/12");
    assert_eq!(cert["atom"], "A1");
}

#[test]
fn certify_e1_names_non_triviality() {
    let out = linex(&["certify", &path("e1.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["outcome"]["hypothesis"], "NonTrivial");
}

#[test]
fn certify_reports_competitive_core_max() {
    let out = linex(&["certify", &path("competitive_core.json")]);
    assert_eq!(out.status.code(), Some(4));
    let evidence = &report(&out)["outcome"]["counterevidence"];
    assert_eq!(evidence["kind"], "decentralized");
    assert_eq!(evidence["price"], serde_json::json!(["1/2", "1/2"]));
}

#[test]
fn certify_out_then_verify() {
    let file = std::env::temp_dir().join(format!("linex-cert-{}.json", std::process::id()));
    let file = file.to_string_lossy().into_owned();
    let out = linex(&["certify", &path("e0.json"), "--out", &file]);
    assert_eq!(out.status.code(), Some(0));
    let out = linex(&["verify", &path("e0.json"), &file]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(report(&out)["outcome"]["verified"], true);

    // A certificate for E0 says nothing about E1.
    let out = linex(&["verify", &path("e1.json"), &file]);
    assert_eq!(out.status.code(), Some(4));

    // The whole run report is accepted too.
    let wrapped = linex(&["certify", &path("e0.json")]);
    std::fs::write(&file, &wrapped.stdout).unwrap();
    assert_eq!(
        linex(&["verify", &path("e0.json"), &file]).status.code(),
        Some(0)
    );
    std::fs::remove_file(&file).ok();
}

#[test]
fn suite_with_zero_trials_is_a_usage_error() {
    let out = linex(&["suite", "--seed", "7", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn suite_payload_is_deterministic() {
    let a = linex(&["suite", "--seed", "7", "--trials", "3"]);
    let b = linex(&["suite", "--seed", "7", "--trials", "3"]);
    let (ra, rb) = (report(&a), report(&b));
    assert_eq!(
        serde_json::to_string(&ra["outcome"]).unwrap(),
        serde_json::to_string(&rb["outcome"]).unwrap()
    );
    assert_eq!(ra["input_digest"], rb["input_digest"]);
    assert_eq!(ra["outcome"]["properties"].as_array().unwrap().len(), 13);
}

#[test]
fn suite_seed_7_fifty_trials_passes() {
    let out = linex(&["suite", "--seed", "7", "--trials", "50"]);
    let r = report(&out);
    assert_eq!(
        out.status.code(),
        Some(0),
        "first failure: {}",
        serde_json::to_string(&r["outcome"]["first_failure"]).unwrap()
    );
}

#[test]
fn analysis_commands() {
    let r = report(&linex(&["report", &path("e0.json")]));
    assert_eq!(r["outcome"]["pareto"]["delta"], "1/2");
    assert_eq!(r["outcome"]["core_max"]["value"], "11/12");
    assert_eq!(
        r["outcome"]["equilibria"][0]["price"],
        serde_json::json!(["1/2", "1/2"])
    );

    let r = report(&linex(&["core-max", &path("e1.json")]));
    assert_eq!(r["outcome"]["trivial"], true);
    assert_eq!(r["outcome"]["value"], "3/4");

    let r = report(&linex(&["find-eq", &path("e0.json")]));
    assert_eq!(r["outcome"]["equilibria"].as_array().unwrap().len(), 1);

    let out = linex(&[
        "check-eq",
        &path("e0.json"),
        "--price",
        "1/2,1/2",
        "--alloc",
        &path("e0_equilibrium.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outcome"]["ok"], true);
    let r = report(&linex(&[
        "check-eq",
        &path("e0.json"),
        "--price",
        "1,3",
        "--alloc",
        &path("e0_equilibrium.json"),
    ]));
    assert_eq!(r["outcome"]["ok"], false);

    let r = report(&linex(&[
        "block",
        &path("e0.json"),
        "--alloc",
        &path("e0_starved.json"),
    ]));
    assert_eq!(r["outcome"]["blocked"], true);
    assert_eq!(r["outcome"]["margin"], "1/4");
    let r = report(&linex(&[
        "block",
        &path("e0.json"),
        "--alloc",
        &path("e0_equilibrium.json"),
    ]));
    assert_eq!(r["outcome"]["blocked"], false);

    let r = report(&linex(&[
        "rescale",
        &path("e0.json"),
        "--lambda",
        "A1=2,C2=1",
    ]));
    assert_eq!(r["outcome"]["cohorts"][0]["mass"], "1/2");
    assert_eq!(
        r["outcome"]["cohorts"][0]["endowment"],
        serde_json::json!(["0", "2"])
    );
}

#[test]
fn analysis_errors_map_to_exit_codes() {
    assert_eq!(
        linex(&["rescale", &path("e0.json"), "--lambda", "A1=2"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        linex(&["rescale", &path("e0.json"), "--lambda", "A1=0,C2=1"])
            .status
            .code(),
        Some(1)
    );
    let zero_price = linex(&[
        "check-eq",
        &path("e0.json"),
        "--price",
        "0,1",
        "--alloc",
        &path("e0_equilibrium.json"),
    ]);
    assert_eq!(zero_price.status.code(), Some(0));
    assert_eq!(report(&zero_price)["outcome"]["ok"], false);
    assert_eq!(
        linex(&[
            "check-eq",
            &path("e0.json"),
            "--price",
            "0,0",
            "--alloc",
            &path("e0_equilibrium.json")
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        linex(&[
            "check-eq",
            &path("e0.json"),
            "--price",
            "1/x,1",
            "--alloc",
            &path("e0_equilibrium.json")
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        linex(&["core-max", &path("bad_weights.json")])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(linex(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(linex(&["--help"]).status.code(), Some(0));
}
