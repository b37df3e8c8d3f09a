use serde_json::Value;

use linex_demo::{analyze, block, certify, preset};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).expect("entry points return JSON")
}

#[test]
fn analyze_e0_draws_the_box() {
    let v = parse(&analyze(&preset("e0")));
    let g = &v["geometry"];
    assert_eq!(g["width"], 1.0);
    assert_eq!(g["height"], 1.0);
    assert_eq!(g["endowment"], serde_json::json!([0.0, 1.0]));
    assert_eq!(g["equilibria"], serde_json::json!([[1.0, 0.0]]));
    let core = g["core_max"].as_array().unwrap();
    assert_eq!(core[0], 1.0);
    assert!((core[1].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(
        g["contract_curve"],
        serde_json::json!([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])
    );
    assert_eq!(v["report"]["core_max"]["value"], "11/12");
}

#[test]
fn certify_presets() {
    assert_eq!(
        parse(&certify(&preset("e0")))["certificate"]["core_value"],
        "11/12"
    );
    assert_eq!(parse(&certify(&preset("e1")))["hypothesis"], "NonTrivial");
    let v = parse(&certify(&preset("competitive_core")));
    assert_eq!(v["error"], "certification_failure");
    assert_eq!(v["counterevidence"]["kind"], "decentralized");
}

#[test]
fn block_points_in_the_box() {
    let e0 = preset("e0");
    // A1 holds everything: C2 is blocked by itself.
    let v = parse(&block(&e0, "1", "1"));
    assert_eq!(v["blocking"]["blocked"], true);
    // The core-max point is unblocked.
    let v = parse(&block(&e0, "1", "2/3"));
    assert_eq!(v["blocking"]["blocked"], false);
    assert_eq!(v["utilities"], serde_json::json!(["11/12", "1/4"]));
    assert_eq!(parse(&block(&e0, "2", "0"))["error"], "infeasible");
}

#[test]
fn bad_input_is_reported() {
    assert_eq!(parse(&analyze("{"))["error"], "parse");
    assert_eq!(parse(&preset("nope"))["error"], "preset");
    let three_goods = r#"{"commodities":3,"cohorts":[{"id":"a","atomic":true,"mass":"1","endowment":["1","1","1"],"utility":["1/3","1/3","1/3"]}]}"#;
    assert_eq!(parse(&analyze(three_goods))["error"], "shape");
}
