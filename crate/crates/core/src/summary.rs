//! JSON views of analysis results, with every rational as a fraction string.
//! Shared by the command-line tool and the browser demo.

use serde_json::{json, Value};

use crate::economy::{Allocation, Economy};
use crate::equilibrium::{
    core_max_allocation, find_equilibrium, pareto_check, supporting_price, AnalysisError,
    BlockingWitness, CompetitiveCheck, CompetitiveEquilibrium, CoreMax, Counterevidence,
    ParetoCheck, MAX_EQUILIBRIUM_GOODS,
};
use crate::rational::{format_rational, Rational};

pub fn rationals(values: &[Rational]) -> Value {
    json!(values.iter().map(format_rational).collect::<Vec<_>>())
}

pub fn allocation(x: &Allocation) -> Value {
    serde_json::to_value(x.to_document()).expect("allocation document serializes")
}

pub fn pareto(p: &ParetoCheck) -> Value {
    json!({
        "optimal": p.optimal,
        "delta": format_rational(&p.delta),
        "improvement": p.improvement.as_ref().map(allocation),
    })
}

pub fn equilibrium(q: &CompetitiveEquilibrium) -> Value {
    json!({"price": rationals(&q.price), "allocation": allocation(&q.allocation)})
}

pub fn core_max(c: &CoreMax) -> Value {
    json!({
        "atom": c.atom,
        "allocation": allocation(&c.allocation),
        "value": format_rational(&c.value),
        "dual": rationals(&c.dual),
        "trivial": c.trivial,
    })
}

pub fn competitive_check(c: &CompetitiveCheck) -> Value {
    json!({"ok": c.ok, "violations": c.violations})
}

pub fn blocking(w: Option<&BlockingWitness>) -> Value {
    match w {
        None => json!({"blocked": false}),
        Some(w) => json!({
            "blocked": true,
            "included_atoms": w.included_atoms,
            "fractions": w.fractions.iter().map(|(k, v)| (k.clone(), json!(format_rational(v)))).collect::<serde_json::Map<_, _>>(),
            "per_capita_bundles": w.per_capita_bundles.iter().map(|(k, b)| (k.clone(), rationals(b))).collect::<serde_json::Map<_, _>>(),
            "margin": format_rational(&w.margin),
        }),
    }
}

pub fn counterevidence(c: &Counterevidence) -> Value {
    match c {
        Counterevidence::Blocked(w) => json!({"kind": "blocked", "witness": blocking(Some(w))}),
        Counterevidence::Decentralized(p) => {
            json!({"kind": "decentralized", "price": rationals(p)})
        }
        Counterevidence::CertificateRejected(why) => {
            json!({"kind": "certificate_rejected", "detail": why})
        }
    }
}

/// Either a value or the reason the analysis does not apply.
fn attempt<T>(
    result: Result<T, AnalysisError>,
    view: impl FnOnce(&T) -> Value,
) -> Result<Value, AnalysisError> {
    match result {
        Ok(v) => Ok(view(&v)),
        Err(AnalysisError::UnsupportedShape(why)) => Ok(json!({"skipped": why})),
        Err(e) => Err(e),
    }
}

/// Pareto status, a supporting price when `ω` is Pareto optimal, all
/// equilibria and the core-max allocation, for shapes where each applies.
pub fn analysis_report(e: &Economy) -> Result<Value, AnalysisError> {
    let p = pareto_check(e)?;
    let support = if p.optimal {
        rationals(&supporting_price(e)?)
    } else {
        Value::Null
    };
    let equilibria = if e.cohorts().len() == 2 && e.commodities() <= MAX_EQUILIBRIUM_GOODS {
        attempt(find_equilibrium(e), |qs| {
            json!(qs.iter().map(equilibrium).collect::<Vec<_>>())
        })?
    } else {
        json!({"skipped": format!("equilibrium search needs 2 cohorts and at most {MAX_EQUILIBRIUM_GOODS} goods")})
    };
    Ok(json!({
        "pareto": pareto(&p),
        "supporting_price": support,
        "equilibria": equilibria,
        "core_max": attempt(core_max_allocation(e), core_max)?,
    }))
}
