//! Seeded randomized property campaign over the economy families.
//!
//! Every trial draws its own generator from `(seed, property, trial)`, so
//! results do not depend on execution order and a failing trial can be
//! replayed on its own.

use std::collections::BTreeMap;

use num_traits::One;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::economy::{parse_economy_json, utility, Allocation, Cohort, Economy};
use crate::equilibrium::{
    certify_noncompetitive_core, check_competitive, core_max_allocation, decentralization_lp,
    decentralizing_prices, find_blocking_coalition, find_equilibrium, rescale, supporting_price,
    transport_allocation, verify_certificate, Decentralization,
};
use crate::lp::{solve_lp, verify_farkas, LinearProgram, LpOutcome, Relation};
use crate::preference::{demand, indirect_utility, max_bang_set, PriceSystem};
use crate::random::{self, trial_rng, CampaignRng};
use crate::rational::{format_rational, frac, int, Rational};

/// Random strictly positive prices tried against each undecentralizable
/// allocation.
const PRICE_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub property: String,
    pub trial: u64,
    pub detail: String,
    pub instance: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub name: String,
    pub trials: u64,
    pub passed: u64,
    /// Informational tallies (for example how often a stronger form held).
    pub notes: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub seed: u64,
    pub trials: u64,
    pub properties: Vec<PropertyReport>,
    pub first_failure: Option<TrialFailure>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

type Notes = Vec<&'static str>;
type Check = fn(&mut CampaignRng, &mut Notes) -> Result<(), (String, Value)>;

pub const PROPERTY_NAMES: [&str; 13] = [
    "document_round_trip",
    "aggregate_linear_in_mass",
    "utility_linear",
    "lp_certificates",
    "bang_sets_disjoint",
    "walras_and_support",
    "no_decentralization",
    "rescaling_invariance",
    "core_membership",
    "noncompetitive_core",
    "supporting_price",
    "equilibria_unblocked",
    "decentralization_consistency",
];

fn checks() -> [Check; 13] {
    [
        document_round_trip,
        aggregate_linear_in_mass,
        utility_linear,
        lp_certificates,
        bang_sets_disjoint,
        walras_and_support,
        no_decentralization,
        rescaling_invariance,
        core_membership,
        noncompetitive_core,
        supporting_price_supports,
        equilibria_unblocked,
        decentralization_consistency,
    ]
}

fn economy_json(e: &Economy) -> Value {
    serde_json::to_value(e.to_document()).expect("document serializes")
}

fn allocation_json(x: &Allocation) -> Value {
    serde_json::to_value(x.to_document()).expect("document serializes")
}

fn prices_json(p: &[Rational]) -> Value {
    json!(p.iter().map(format_rational).collect::<Vec<_>>())
}

fn fail<T>(detail: impl Into<String>, instance: Value) -> Result<T, (String, Value)> {
    Err((detail.into(), instance))
}

fn document_round_trip(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let e = random::economy(rng, 4);
    let text = e.to_json();
    match parse_economy_json(&text) {
        Ok(Ok(back)) if back == e && back.to_json() == text => Ok(()),
        other => fail(
            format!("document did not round-trip: {other:?}"),
            economy_json(&e),
        ),
    }
}

fn aggregate_linear_in_mass(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let e = random::economy(rng, 4);
    let factor = int(rng.gen_range(2..=5));
    let scaled = e
        .cohorts()
        .iter()
        .map(|c| Cohort {
            mass: &c.mass * &factor,
            ..c.clone()
        })
        .collect();
    let scaled = Economy::new(e.commodities(), scaled).expect("scaling masses keeps invariants");
    if scaled.aggregate_endowment() == e.aggregate_endowment().scaled(&factor) {
        Ok(())
    } else {
        fail(
            format!("scaling masses by {factor} did not scale the aggregate"),
            economy_json(&e),
        )
    }
}

fn utility_linear(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let l = random::goods(rng);
    let c = random::cohort(rng, "c", false, l);
    let (x, y) = (random::endowment(rng, l), random::endowment(rng, l));
    let alpha = frac(rng.gen_range(0..=8), rng.gen_range(1..=4));
    let beta = frac(rng.gen_range(0..=8), rng.gen_range(1..=4));
    let mix: Vec<Rational> = x
        .iter()
        .zip(y.iter())
        .map(|(u, v)| &alpha * u + &beta * v)
        .collect();
    let lhs = utility(&c, &mix).expect("shape");
    let rhs = &alpha * utility(&c, &x).expect("shape") + &beta * utility(&c, &y).expect("shape");
    if lhs == rhs {
        Ok(())
    } else {
        fail(
            "utility of a combination differs from the combination of utilities",
            json!({"weights": prices_json(&c.utility), "x": prices_json(&x), "y": prices_json(&y)}),
        )
    }
}

fn lp_certificates(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let lp = random::linear_program(rng, 6, 6);
    let instance = serde_json::to_value(&lp).expect("lp serializes");
    match (solve_lp(&lp), solve_lp(&lp)) {
        (Ok(a), Ok(b)) if a == b => Ok(()),
        (Ok(_), Ok(_)) => fail("repeated solves differ", instance),
        (Err(e), _) | (_, Err(e)) => fail(e.to_string(), instance),
    }
}

fn bang_sets_disjoint(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let l = random::goods(rng);
    let (a1, a2) = random::distinct_weights(rng, l);
    let p1 = PriceSystem::new(a1.to_vec()).expect("positive");
    let p2 = PriceSystem::new(a2.to_vec()).expect("positive");
    let s1 = max_bang_set(&p2, &a1).expect("positive prices");
    let s2 = max_bang_set(&p1, &a2).expect("positive prices");
    if s1.is_disjoint(&s2) {
        Ok(())
    } else {
        fail(
            format!("bang sets intersect: {:?} and {:?}", s1.0, s2.0),
            json!({"a1": prices_json(&a1), "a2": prices_json(&a2)}),
        )
    }
}

fn walras_and_support(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let l = random::goods(rng);
    let atomic = rng.gen_bool(0.5);
    let c = random::cohort(rng, "c", atomic, l);
    let raw = random::raw_price(rng, l);
    let p = PriceSystem::new(raw.clone()).expect("positive");
    let instance = json!({"weights": prices_json(&c.utility), "endowment": prices_json(&c.endowment), "price": prices_json(&raw)});
    let d = demand(&c, &p).map_err(|e| (e.to_string(), instance.clone()))?;
    if p.value(&d) != p.value(&c.endowment) {
        return fail("demand does not exhaust the budget", instance);
    }
    let bang = max_bang_set(&p, &c.utility).expect("positive");
    if !d.support().iter().all(|&j| bang.contains(j)) {
        return fail("demand support leaves the bang set", instance);
    }
    let scale = int(rng.gen_range(2..=9));
    let scaled = PriceSystem::new(raw.iter().map(|q| q * &scale).collect()).expect("positive");
    if demand(&c, &scaled).ok() != Some(d.clone())
        || max_bang_set(&scaled, &c.utility).ok() != Some(bang)
    {
        return fail(
            "demand is not homogeneous of degree zero in prices",
            instance,
        );
    }
    let v = indirect_utility(&c, &p).expect("positive");
    if v != utility(&c, &d).expect("shape") {
        return fail("indirect utility differs from utility of demand", instance);
    }
    let mut budget = LinearProgram::nonnegative(l);
    budget.objective = c.utility.to_vec();
    budget.add_row(p.to_vec(), Relation::Le, p.value(&c.endowment));
    match solve_lp(&budget) {
        Ok(LpOutcome::Optimal(s)) if s.value == v => Ok(()),
        other => fail(
            format!("budget LP disagrees with indirect utility: {other:?}"),
            instance,
        ),
    }
}

fn no_decentralization(rng: &mut CampaignRng, notes: &mut Notes) -> Result<(), (String, Value)> {
    let e = random::two_atom_nontrivial(rng);
    let unit: crate::equilibrium::Lambda = e
        .cohorts()
        .iter()
        .map(|c| (c.id.clone(), c.mass.clone()))
        .collect();
    let e = rescale(&e, &unit).map_err(|err| (err.to_string(), economy_json(&e)))?;
    let [c1, c2] = e.cohorts() else {
        unreachable!("two cohorts")
    };
    if !c1.mass.is_one() || !c2.mass.is_one() {
        return fail("rescaling did not normalize masses", economy_json(&e));
    }
    let total = e.aggregate_endowment();
    let d1 = demand(
        c1,
        &PriceSystem::new(c2.utility.to_vec()).expect("positive"),
    )
    .expect("positive");
    let d2 = demand(
        c2,
        &PriceSystem::new(c1.utility.to_vec()).expect("positive"),
    )
    .expect("positive");
    let (f1, f2) = (d1.le(&total), d2.le(&total));
    if !f1 && !f2 {
        notes.push("both_cross_demands_infeasible");
    }
    if f1 && f2 {
        fail(
            "both cross demands fit inside the aggregate endowment",
            economy_json(&e),
        )
    } else {
        Ok(())
    }
}

fn rescaling_invariance(rng: &mut CampaignRng, notes: &mut Notes) -> Result<(), (String, Value)> {
    let l = random::goods(rng);
    let flags = [rng.gen_bool(0.5), rng.gen_bool(0.5)];
    let e = random::economy_with(rng, l, &flags);
    let mut pair = None;
    if rng.gen_bool(0.5) {
        let eqs = find_equilibrium(&e).map_err(|err| (err.to_string(), economy_json(&e)))?;
        if let Some(q) = eqs.into_iter().next() {
            pair = Some((q.price, q.allocation));
        }
    }
    let (p, x) =
        pair.unwrap_or_else(|| (random::price(rng, l), random::feasible_allocation(rng, &e)));
    let lambda = random::lambda(rng, &e);
    let instance = json!({
        "economy": economy_json(&e),
        "allocation": allocation_json(&x),
        "price": prices_json(&p),
        "lambda": lambda.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect::<BTreeMap<_, _>>(),
    });
    let mut run = || -> Result<bool, crate::AnalysisError> {
        let r = rescale(&e, &lambda)?;
        let y = transport_allocation(&x, &lambda)?;
        let blocked_before = find_blocking_coalition(&e, &x)?.is_some();
        let blocked_after = find_blocking_coalition(&r, &y)?.is_some();
        let competitive_before = check_competitive(&e, &p, &x)?.ok;
        let competitive_after = check_competitive(&r, &p, &y)?.ok;
        if competitive_before {
            notes.push("competitive_case");
        }
        if !blocked_before {
            notes.push("unblocked_case");
        }
        Ok(blocked_before == blocked_after && competitive_before == competitive_after)
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => fail(
            "blocking or competitive outcome changed under rescaling",
            instance,
        ),
        Err(err) => fail(err.to_string(), instance),
    }
}

fn core_membership(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let e = random::unbalanced_nontrivial(rng);
    let run = || -> Result<bool, crate::AnalysisError> {
        let core = core_max_allocation(&e)?;
        Ok(find_blocking_coalition(&e, &core.allocation)?.is_none())
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => fail("core-max allocation is blocked", economy_json(&e)),
        Err(err) => fail(err.to_string(), economy_json(&e)),
    }
}

fn noncompetitive_core(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let e = random::unbalanced_nontrivial(rng);
    match certify_noncompetitive_core(&e) {
        Ok(cert) => verify_certificate(&cert, &e).map_err(|why| (why, economy_json(&e))),
        Err(err) => fail(err.to_string(), economy_json(&e)),
    }
}

fn supporting_price_supports(rng: &mut CampaignRng, _: &mut Notes) -> Result<(), (String, Value)> {
    let e = random::pareto_optimal_economy(rng, 2);
    let run = || -> Result<bool, crate::AnalysisError> {
        let p = supporting_price(&e)?;
        Ok(p.is_strictly_positive() && check_competitive(&e, &p, &e.endowment_allocation())?.ok)
    };
    match run() {
        Ok(true) => Ok(()),
        Ok(false) => fail(
            "supporting price does not make ω competitive",
            economy_json(&e),
        ),
        Err(err) => fail(err.to_string(), economy_json(&e)),
    }
}

fn equilibria_unblocked(rng: &mut CampaignRng, notes: &mut Notes) -> Result<(), (String, Value)> {
    let l = random::goods(rng);
    let flags = [rng.gen_bool(0.5), rng.gen_bool(0.5)];
    let e = random::economy_with(rng, l, &flags);
    let mut run = || -> Result<Option<String>, crate::AnalysisError> {
        let eqs = find_equilibrium(&e)?;
        if eqs.is_empty() {
            notes.push("no_equilibrium_found");
        }
        for q in &eqs {
            if !check_competitive(&e, &q.price, &q.allocation)?.ok {
                return Ok(Some(
                    "returned equilibrium fails the competitive check".into(),
                ));
            }
            if find_blocking_coalition(&e, &q.allocation)?.is_some() {
                return Ok(Some("returned equilibrium is blocked".into()));
            }
        }
        Ok(None)
    };
    match run() {
        Ok(None) => Ok(()),
        Ok(Some(why)) => fail(why, economy_json(&e)),
        Err(err) => fail(err.to_string(), economy_json(&e)),
    }
}

fn decentralization_consistency(
    rng: &mut CampaignRng,
    notes: &mut Notes,
) -> Result<(), (String, Value)> {
    let l = random::goods(rng);
    let flags = [rng.gen_bool(0.5), rng.gen_bool(0.5)];
    let e = random::economy_with(rng, l, &flags);
    let x = match rng.gen_range(0..3) {
        0 => e.endowment_allocation(),
        1 => match find_equilibrium(&e) {
            Ok(eqs) if !eqs.is_empty() => eqs[0].allocation.clone(),
            _ => random::feasible_allocation(rng, &e),
        },
        _ => random::feasible_allocation(rng, &e),
    };
    let instance = json!({"economy": economy_json(&e), "allocation": allocation_json(&x)});
    let outcome =
        decentralizing_prices(&e, &x).map_err(|err| (err.to_string(), instance.clone()))?;
    match outcome {
        Decentralization::Price(p) => {
            notes.push("price_found");
            match check_competitive(&e, &p, &x) {
                Ok(c) if c.ok => Ok(()),
                _ => fail("returned price does not decentralize", instance),
            }
        }
        Decentralization::Infeasible(cert) => {
            notes.push("infeasible");
            let lp =
                decentralization_lp(&e, &x).map_err(|err| (err.to_string(), instance.clone()))?;
            if verify_farkas(&lp, &cert.multipliers).is_err() {
                return fail("Farkas certificate does not verify", instance);
            }
            for _ in 0..PRICE_SAMPLES {
                let q = random::price(rng, l);
                if check_competitive(&e, &q, &x).map(|c| c.ok).unwrap_or(false) {
                    return fail(
                        "a sampled price decentralizes an allocation certified infeasible",
                        instance,
                    );
                }
            }
            Ok(())
        }
    }
}

struct TrialOutcome {
    result: Result<(), (String, Value)>,
    notes: Notes,
}

fn run_trials(seed: u64, family: usize, trials: u64) -> Vec<TrialOutcome> {
    let check = checks()[family];
    let one = move |trial: u64| {
        let mut rng = trial_rng(seed, family as u64, trial);
        let mut notes = Notes::new();
        let result = check(&mut rng, &mut notes);
        TrialOutcome { result, notes }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(one).collect()
    }
}

/// Runs `trials` trials of every property. Reports are assembled in
/// property and trial order.
pub fn run_campaign(seed: u64, trials: u64) -> CampaignReport {
    let mut properties = Vec::new();
    let mut first_failure = None;
    for (family, name) in PROPERTY_NAMES.iter().enumerate() {
        let outcomes = run_trials(seed, family, trials);
        let mut notes = BTreeMap::new();
        let mut passed = 0;
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            for note in outcome.notes {
                *notes.entry(note.to_string()).or_insert(0) += 1;
            }
            match outcome.result {
                Ok(()) => passed += 1,
                Err((detail, instance)) => {
                    if first_failure.is_none() {
                        first_failure = Some(TrialFailure {
                            property: name.to_string(),
                            trial: trial as u64,
                            detail,
                            instance,
                        });
                    }
                }
            }
        }
        properties.push(PropertyReport {
            name: name.to_string(),
            trials,
            passed,
            notes,
        });
    }
    CampaignReport {
        seed,
        trials,
        properties,
        first_failure,
    }
}
