//! WebAssembly entry points for the Edgeworth-box page in `www/`.
//!
//! Every function takes and returns JSON strings so the page needs no
//! generated bindings beyond plain strings. Errors come back as
//! `{"error": ...}` objects rather than exceptions.

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use linex_core::economy::{parse_economy_json, Allocation, Bundle};
use linex_core::equilibrium::{
    certify_noncompetitive_core, find_blocking_coalition, AnalysisError,
};
use linex_core::fixtures;
use linex_core::rational::{format_rational, parse_rational, Rational};
use linex_core::{summary, Economy};

fn error(kind: &str, detail: impl ToString) -> String {
    json!({"error": kind, "detail": detail.to_string()}).to_string()
}

fn analysis_error(e: &AnalysisError) -> String {
    match e {
        AnalysisError::CertificationFailure(ev) => json!({
            "error": "certification_failure",
            "detail": e.to_string(),
            "counterevidence": summary::counterevidence(ev),
        })
        .to_string(),
        AnalysisError::HypothesisViolation(h) => {
            json!({"error": "hypothesis_violation", "hypothesis": h, "detail": e.to_string()})
                .to_string()
        }
        other => error("analysis", other),
    }
}

fn load(economy_json: &str) -> Result<Economy, String> {
    match parse_economy_json(economy_json) {
        Ok(Ok(e)) => Ok(e),
        Ok(Err(m)) => Err(error(m.kind(), &m)),
        Err(j) => Err(error("parse", j)),
    }
}

/// Economies the box can draw: two cohorts, two goods.
fn load_box(economy_json: &str) -> Result<Economy, String> {
    let e = load(economy_json)?;
    if e.commodities() != 2 || e.cohorts().len() != 2 {
        return Err(error(
            "shape",
            "the Edgeworth box needs exactly two cohorts and two goods",
        ));
    }
    Ok(e)
}

fn float(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Aggregate holdings of the first cohort, the point plotted in the box.
fn point(e: &Economy, x: &Allocation) -> Value {
    let c = &e.cohorts()[0];
    let b = &x.bundles[&c.id];
    json!([float(&(&c.mass * &b[0])), float(&(&c.mass * &b[1]))])
}

/// Pareto set of a two-good linear economy, as a path in the box from the
/// first cohort's origin to the opposite corner: that cohort first collects
/// the good it values relatively more, then the other one. `None` when both
/// cohorts rank the goods identically and every allocation is efficient.
fn contract_curve(e: &Economy) -> Option<Value> {
    let (a, b) = (&e.cohorts()[0].utility, &e.cohorts()[1].utility);
    let w = e.aggregate_endowment();
    let (lhs, rhs) = (&a[0] * &b[1], &a[1] * &b[0]);
    let corner = if lhs > rhs {
        // first cohort values good 0 relatively more
        [float(&w[0]), 0.0]
    } else if lhs < rhs {
        [0.0, float(&w[1])]
    } else {
        return None;
    };
    Some(json!([[0.0, 0.0], corner, [float(&w[0]), float(&w[1])]]))
}

/// Full analysis plus drawing geometry for the box.
#[wasm_bindgen]
pub fn analyze(economy_json: &str) -> String {
    let e = match load_box(economy_json) {
        Ok(e) => e,
        Err(msg) => return msg,
    };
    let report = match summary::analysis_report(&e) {
        Ok(r) => r,
        Err(err) => return analysis_error(&err),
    };
    let w = e.aggregate_endowment();
    let equilibria: Vec<Value> = linex_core::equilibrium::find_equilibrium(&e)
        .map(|qs| qs.iter().map(|q| point(&e, &q.allocation)).collect())
        .unwrap_or_default();
    let core_max = linex_core::equilibrium::core_max_allocation(&e)
        .ok()
        .map(|c| point(&e, &c.allocation));
    json!({
        "report": report,
        "geometry": {
            "width": float(&w[0]),
            "height": float(&w[1]),
            "endowment": point(&e, &e.endowment_allocation()),
            "contract_curve": contract_curve(&e),
            "equilibria": equilibria,
            "core_max": core_max,
            "cohorts": e.cohorts().iter().map(|c| &c.id).collect::<Vec<_>>(),
        },
    })
    .to_string()
}

/// Certificate that the core holds a non-competitive allocation, or the
/// reason none could be built.
#[wasm_bindgen]
pub fn certify(economy_json: &str) -> String {
    let e = match load(economy_json) {
        Ok(e) => e,
        Err(msg) => return msg,
    };
    match certify_noncompetitive_core(&e) {
        Ok(cert) => json!({"certificate": cert}).to_string(),
        Err(err) => analysis_error(&err),
    }
}

/// Tests whether some coalition blocks the allocation in which the first
/// cohort holds the aggregate amounts `(good0, good1)` (fraction strings)
/// and the second cohort holds the rest.
#[wasm_bindgen]
pub fn block(economy_json: &str, good0: &str, good1: &str) -> String {
    let e = match load_box(economy_json) {
        Ok(e) => e,
        Err(msg) => return msg,
    };
    let held = match (parse_rational(good0), parse_rational(good1)) {
        (Ok(u), Ok(v)) => [u, v],
        _ => return error("parse", "coordinates must be fraction strings"),
    };
    let w = e.aggregate_endowment();
    let [c0, c1] = e.cohorts() else {
        unreachable!("checked shape")
    };
    let first: Vec<Rational> = held.iter().map(|h| h / &c0.mass).collect();
    let second: Vec<Rational> = (0..2).map(|j| (&w[j] - &held[j]) / &c1.mass).collect();
    let (Ok(first), Ok(second)) = (Bundle::new(first), Bundle::new(second)) else {
        return error("infeasible", "the point lies outside the box");
    };
    let x = Allocation::from_pairs([(c0.id.clone(), first), (c1.id.clone(), second)]);
    match find_blocking_coalition(&e, &x) {
        Ok(w) => json!({
            "allocation": summary::allocation(&x),
            "utilities": e.cohorts().iter().map(|c| format_rational(&linex_core::economy::utility(c, &x.bundles[&c.id]).expect("shape"))).collect::<Vec<_>>(),
            "blocking": summary::blocking(w.as_ref()),
        })
        .to_string(),
        Err(err) => analysis_error(&err),
    }
}

/// Economy document for a named preset: `e0`, `e1` or `competitive_core`.
#[wasm_bindgen]
pub fn preset(name: &str) -> String {
    let e = match name {
        "e0" => fixtures::e0(),
        "e1" => fixtures::e1(),
        "competitive_core" => fixtures::competitive_core(),
        other => return error("preset", format!("unknown preset {other:?}")),
    };
    e.to_json()
}
