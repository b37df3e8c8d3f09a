//! Finite-type economies: cohorts of identical consumers, each either a
//! single atom or an atomless continuum, with linear utilities.
//!
//! All bundles are per-capita. Aggregates multiply by the cohort mass.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Deref;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{dot, format_rational, parse_rational, sum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{context}: malformed rational {token:?}")]
    MalformedRational { context: String, token: String },
    #[error("{context}: expected length {expected}, found {found}")]
    LengthMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("cohort {cohort:?}: mass must be strictly positive")]
    NonPositiveMass { cohort: String },
    #[error("{context}: negative quantity")]
    NegativeQuantity { context: String },
    #[error("cohort {cohort:?}: utility weights {detail}")]
    WeightsNotNormalized { cohort: String, detail: String },
    #[error("duplicate cohort id {0:?}")]
    DuplicateCohortId(String),
    #[error("aggregate endowment of good {good} is zero")]
    ZeroAggregateCommodity { good: usize },
    #[error("economy must have at least one commodity and one cohort")]
    EmptyEconomy,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unknown cohort id {0:?}")]
    UnknownCohort(String),
}

impl ModelError {
    /// Stable name of the error kind, used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            ModelError::MalformedRational { .. } => "MalformedRational",
            ModelError::LengthMismatch { .. } => "LengthMismatch",
            ModelError::NonPositiveMass { .. } => "NonPositiveMass",
            ModelError::NegativeQuantity { .. } => "NegativeQuantity",
            ModelError::WeightsNotNormalized { .. } => "WeightsNotNormalized",
            ModelError::DuplicateCohortId(_) => "DuplicateCohortId",
            ModelError::ZeroAggregateCommodity { .. } => "ZeroAggregateCommodity",
            ModelError::EmptyEconomy => "EmptyEconomy",
            ModelError::ShapeMismatch(_) => "ShapeMismatch",
            ModelError::UnknownCohort(_) => "UnknownCohort",
        }
    }
}

/// A non-negative commodity bundle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(Vec<Rational>);

impl Bundle {
    pub fn new(quantities: Vec<Rational>) -> Result<Self, ModelError> {
        if quantities.iter().any(|q| q.is_negative()) {
            return Err(ModelError::NegativeQuantity {
                context: "bundle".into(),
            });
        }
        Ok(Bundle(quantities))
    }

    pub fn zeros(len: usize) -> Self {
        Bundle(vec![Rational::zero(); len])
    }

    /// Bundle with `amount` of good `good` and nothing else.
    pub fn unit(len: usize, good: usize, amount: Rational) -> Self {
        let mut q = vec![Rational::zero(); len];
        q[good] = amount;
        Bundle::new(q).expect("unit bundle amount must be non-negative")
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.0
    }

    pub fn scaled(&self, factor: &Rational) -> Bundle {
        debug_assert!(!factor.is_negative());
        Bundle(self.0.iter().map(|q| q * factor).collect())
    }

    /// Indices of goods held in strictly positive quantity.
    pub fn support(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, q)| q.is_positive())
            .map(|(j, _)| j)
            .collect()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Bundle) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Deref for Bundle {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

/// Strictly positive weights summing to one; `u(x) = a · x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UtilityWeights(Vec<Rational>);

impl UtilityWeights {
    pub fn new(weights: Vec<Rational>) -> Result<Self, ModelError> {
        Self::checked(weights, "")
    }

    fn checked(weights: Vec<Rational>, cohort: &str) -> Result<Self, ModelError> {
        if weights.iter().any(|w| !w.is_positive()) {
            return Err(ModelError::WeightsNotNormalized {
                cohort: cohort.into(),
                detail: "must be strictly positive".into(),
            });
        }
        let total = sum(&weights);
        if !total.is_one() {
            return Err(ModelError::WeightsNotNormalized {
                cohort: cohort.into(),
                detail: format!("sum to {}, not 1", format_rational(&total)),
            });
        }
        Ok(UtilityWeights(weights))
    }

    /// Normalizes a strictly positive vector so it sums to one.
    pub fn normalized(raw: Vec<Rational>) -> Result<Self, ModelError> {
        let total = sum(&raw);
        if total.is_zero() {
            return Self::new(raw);
        }
        Self::new(raw.into_iter().map(|w| w / &total).collect())
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }
}

impl Deref for UtilityWeights {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

/// One agent type: a single atom or an atomless continuum of identical
/// consumers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cohort {
    pub id: String,
    pub atomic: bool,
    pub mass: Rational,
    pub endowment: Bundle,
    pub utility: UtilityWeights,
}

impl Cohort {
    /// Two cohorts share a type when preferences and endowments coincide.
    pub fn same_type(&self, other: &Cohort) -> bool {
        self.utility == other.utility && self.endowment == other.endowment
    }
}

/// Exact dot product `a_c · x`.
pub fn utility(cohort: &Cohort, bundle: &[Rational]) -> Result<Rational, ModelError> {
    if cohort.utility.len() != bundle.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "cohort {:?} has {} weights, bundle has {} goods",
            cohort.id,
            cohort.utility.len(),
            bundle.len()
        )));
    }
    Ok(dot(&cohort.utility, bundle))
}

/// A validated economy. Construct through [`Economy::new`] or
/// [`validate_economy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Economy {
    commodities: usize,
    cohorts: Vec<Cohort>,
}

impl Economy {
    pub fn new(commodities: usize, cohorts: Vec<Cohort>) -> Result<Self, ModelError> {
        if commodities == 0 || cohorts.is_empty() {
            return Err(ModelError::EmptyEconomy);
        }
        let mut seen = BTreeSet::new();
        for c in &cohorts {
            if !seen.insert(c.id.as_str()) {
                return Err(ModelError::DuplicateCohortId(c.id.clone()));
            }
            if !c.mass.is_positive() {
                return Err(ModelError::NonPositiveMass {
                    cohort: c.id.clone(),
                });
            }
            for (what, len) in [
                ("endowment", c.endowment.len()),
                ("utility", c.utility.len()),
            ] {
                if len != commodities {
                    return Err(ModelError::LengthMismatch {
                        context: format!("cohort {:?} {what}", c.id),
                        expected: commodities,
                        found: len,
                    });
                }
            }
        }
        let economy = Economy {
            commodities,
            cohorts,
        };
        if let Some(good) = economy
            .aggregate_endowment()
            .iter()
            .position(|q| q.is_zero())
        {
            return Err(ModelError::ZeroAggregateCommodity { good });
        }
        Ok(economy)
    }

    pub fn commodities(&self) -> usize {
        self.commodities
    }

    pub fn cohorts(&self) -> &[Cohort] {
        &self.cohorts
    }

    pub fn cohort(&self, id: &str) -> Option<&Cohort> {
        self.cohorts.iter().find(|c| c.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.cohorts.iter().position(|c| c.id == id)
    }

    /// `∫ω = Σ mass_i · ω_i`.
    pub fn aggregate_endowment(&self) -> Bundle {
        let mut total = vec![Rational::zero(); self.commodities];
        for c in &self.cohorts {
            for (t, q) in total.iter_mut().zip(c.endowment.iter()) {
                *t += &c.mass * q;
            }
        }
        Bundle(total)
    }

    /// The initial allocation `ω` as an [`Allocation`].
    pub fn endowment_allocation(&self) -> Allocation {
        Allocation {
            bundles: self
                .cohorts
                .iter()
                .map(|c| (c.id.clone(), c.endowment.clone()))
                .collect(),
        }
    }

    /// Aggregate `Σ mass_i · x_i` of an allocation.
    pub fn aggregate(&self, x: &Allocation) -> Result<Bundle, ModelError> {
        self.check_shape(x)?;
        let mut total = vec![Rational::zero(); self.commodities];
        for c in &self.cohorts {
            for (t, q) in total.iter_mut().zip(x.bundles[&c.id].iter()) {
                *t += &c.mass * q;
            }
        }
        Ok(Bundle(total))
    }

    /// Checks that `x` covers exactly this economy's cohorts with bundles of
    /// the right length.
    pub fn check_shape(&self, x: &Allocation) -> Result<(), ModelError> {
        if x.bundles.len() != self.cohorts.len() {
            return Err(ModelError::ShapeMismatch(format!(
                "allocation has {} bundles for {} cohorts",
                x.bundles.len(),
                self.cohorts.len()
            )));
        }
        for c in &self.cohorts {
            let b = x
                .bundles
                .get(&c.id)
                .ok_or_else(|| ModelError::UnknownCohort(c.id.clone()))?;
            if b.len() != self.commodities {
                return Err(ModelError::LengthMismatch {
                    context: format!("allocation bundle {:?}", c.id),
                    expected: self.commodities,
                    found: b.len(),
                });
            }
        }
        Ok(())
    }

    pub fn is_feasible(&self, x: &Allocation, mode: FeasibilityMode) -> Result<bool, ModelError> {
        let total = self.aggregate(x)?;
        let endowment = self.aggregate_endowment();
        Ok(match mode {
            FeasibilityMode::Exact => total == endowment,
            FeasibilityMode::FreeDisposal => total.le(&endowment),
        })
    }

    pub fn to_document(&self) -> EconomyDocument {
        EconomyDocument {
            commodities: self.commodities as u64,
            cohorts: self
                .cohorts
                .iter()
                .map(|c| CohortDocument {
                    id: c.id.clone(),
                    atomic: c.atomic,
                    mass: format_rational(&c.mass),
                    endowment: c.endowment.iter().map(format_rational).collect(),
                    utility: c.utility.iter().map(format_rational).collect(),
                })
                .collect(),
        }
    }

    /// Canonical JSON text of the economy document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibilityMode {
    /// `Σ mass_i x_i = ∫ω`
    Exact,
    /// `Σ mass_i x_i ≤ ∫ω`
    FreeDisposal,
}

/// Per-capita bundles keyed by cohort id (equal treatment within a cohort).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub bundles: BTreeMap<String, Bundle>,
}

impl Allocation {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Bundle)>,
        S: Into<String>,
    {
        Allocation {
            bundles: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<&Bundle> {
        self.bundles.get(id)
    }

    pub fn to_document(&self) -> AllocationDocument {
        AllocationDocument {
            bundles: self
                .bundles
                .iter()
                .map(|(k, b)| (k.clone(), b.iter().map(format_rational).collect()))
                .collect(),
        }
    }

    pub fn from_document(doc: &AllocationDocument) -> Result<Self, ModelError> {
        let mut bundles = BTreeMap::new();
        for (id, tokens) in &doc.bundles {
            let context = format!("allocation bundle {id:?}");
            let quantities = parse_tokens(tokens, &context)?;
            let bundle = Bundle::new(quantities).map_err(|_| ModelError::NegativeQuantity {
                context: context.clone(),
            })?;
            bundles.insert(id.clone(), bundle);
        }
        Ok(Allocation { bundles })
    }
}

/// On-disk economy document. Rationals stay as strings until validation so
/// malformed tokens surface as validation errors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EconomyDocument {
    pub commodities: u64,
    pub cohorts: Vec<CohortDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortDocument {
    pub id: String,
    pub atomic: bool,
    pub mass: String,
    pub endowment: Vec<String>,
    pub utility: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationDocument {
    pub bundles: BTreeMap<String, Vec<String>>,
}

fn parse_tokens(tokens: &[String], context: &str) -> Result<Vec<Rational>, ModelError> {
    tokens
        .iter()
        .map(|t| {
            parse_rational(t).map_err(|_| ModelError::MalformedRational {
                context: context.to_string(),
                token: t.clone(),
            })
        })
        .collect()
}

/// Every invariant violation in a document, in document order. Empty means
/// the document validates.
pub fn document_violations(doc: &EconomyDocument) -> Vec<ModelError> {
    let mut out = Vec::new();
    let l = doc.commodities as usize;
    if l == 0 || doc.cohorts.is_empty() {
        out.push(ModelError::EmptyEconomy);
    }
    let mut seen = BTreeSet::new();
    let mut aggregate = vec![Rational::zero(); l];
    let mut aggregate_ok = true;
    for c in &doc.cohorts {
        if !seen.insert(c.id.as_str()) {
            out.push(ModelError::DuplicateCohortId(c.id.clone()));
        }
        let mass = match parse_tokens(
            std::slice::from_ref(&c.mass),
            &format!("cohort {:?} mass", c.id),
        ) {
            Ok(m) => {
                let m = m.into_iter().next().expect("one token");
                if !m.is_positive() {
                    out.push(ModelError::NonPositiveMass {
                        cohort: c.id.clone(),
                    });
                }
                Some(m)
            }
            Err(e) => {
                out.push(e);
                None
            }
        };
        let endowment_ctx = format!("cohort {:?} endowment", c.id);
        let endowment = match parse_tokens(&c.endowment, &endowment_ctx) {
            Ok(e) => {
                if e.len() != l {
                    out.push(ModelError::LengthMismatch {
                        context: endowment_ctx.clone(),
                        expected: l,
                        found: e.len(),
                    });
                    None
                } else if e.iter().any(|q| q.is_negative()) {
                    out.push(ModelError::NegativeQuantity {
                        context: endowment_ctx.clone(),
                    });
                    None
                } else {
                    Some(e)
                }
            }
            Err(e) => {
                out.push(e);
                None
            }
        };
        let utility_ctx = format!("cohort {:?} utility", c.id);
        match parse_tokens(&c.utility, &utility_ctx) {
            Ok(w) if w.len() != l => out.push(ModelError::LengthMismatch {
                context: utility_ctx,
                expected: l,
                found: w.len(),
            }),
            Ok(w) => {
                if let Err(e) = UtilityWeights::checked(w, &c.id) {
                    out.push(e);
                }
            }
            Err(e) => out.push(e),
        }
        match (mass, endowment) {
            (Some(m), Some(e)) if m.is_positive() => {
                for (t, q) in aggregate.iter_mut().zip(&e) {
                    *t += &m * q;
                }
            }
            _ => aggregate_ok = false,
        }
    }
    if aggregate_ok && !doc.cohorts.is_empty() {
        for (good, q) in aggregate.iter().enumerate() {
            if q.is_zero() {
                out.push(ModelError::ZeroAggregateCommodity { good });
            }
        }
    }
    out
}

/// Validates a parsed document into an [`Economy`], reporting the first
/// violation found.
pub fn validate_economy(doc: &EconomyDocument) -> Result<Economy, ModelError> {
    if let Some(first) = document_violations(doc).into_iter().next() {
        return Err(first);
    }
    let cohorts = doc
        .cohorts
        .iter()
        .map(|c| {
            let mass = parse_rational(&c.mass).expect("validated");
            let endowment = c
                .endowment
                .iter()
                .map(|t| parse_rational(t).expect("validated"));
            let utility = c
                .utility
                .iter()
                .map(|t| parse_rational(t).expect("validated"));
            Ok(Cohort {
                id: c.id.clone(),
                atomic: c.atomic,
                mass,
                endowment: Bundle::new(endowment.collect())?,
                utility: UtilityWeights::new(utility.collect())?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Economy::new(doc.commodities as usize, cohorts)
}

/// Parses and validates economy JSON text. JSON syntax errors are reported
/// separately from invariant violations.
pub fn parse_economy_json(text: &str) -> Result<Result<Economy, ModelError>, serde_json::Error> {
    let doc: EconomyDocument = serde_json::from_str(text)?;
    Ok(validate_economy(&doc))
}

pub fn parse_allocation_json(
    text: &str,
) -> Result<Result<Allocation, ModelError>, serde_json::Error> {
    let doc: AllocationDocument = serde_json::from_str(text)?;
    Ok(Allocation::from_document(&doc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn e0_doc() -> EconomyDocument {
        serde_json::from_str(
            r#"{"commodities": 2, "cohorts": [
                {"id": "A1", "atomic": true, "mass": "1", "endowment": ["0", "1"], "utility": ["3/4", "1/4"]},
                {"id": "C2", "atomic": false, "mass": "1", "endowment": ["1", "0"], "utility": ["1/4", "3/4"]}
            ]}"#,
        )
        .unwrap()
    }

    fn b(pairs: &[(i64, i64)]) -> Bundle {
        Bundle::new(crate::rational::vec_frac(pairs)).unwrap()
    }

    #[test]
    fn e0_validates() {
        let e = validate_economy(&e0_doc()).unwrap();
        assert_eq!(e.commodities(), 2);
        assert_eq!(e.cohorts().len(), 2);
        assert!(e.cohort("A1").unwrap().atomic);
    }

    #[test]
    fn unnormalized_weights_rejected() {
        let mut doc = e0_doc();
        doc.cohorts[0].utility = vec!["3/4".into(), "3/4".into()];
        assert!(matches!(
            validate_economy(&doc),
            Err(ModelError::WeightsNotNormalized { .. })
        ));
        doc.cohorts[0].utility = vec!["1".into(), "0".into()];
        assert!(matches!(
            validate_economy(&doc),
            Err(ModelError::WeightsNotNormalized { .. })
        ));
    }

    #[test]
    fn zero_aggregate_rejected() {
        let mut doc = e0_doc();
        doc.cohorts[1].endowment = vec!["0".into(), "1".into()];
        assert_eq!(
            validate_economy(&doc),
            Err(ModelError::ZeroAggregateCommodity { good: 0 })
        );
    }

    #[test]
    fn other_document_errors() {
        let mut doc = e0_doc();
        doc.cohorts[0].mass = "0".into();
        assert!(matches!(
            validate_economy(&doc),
            Err(ModelError::NonPositiveMass { .. })
        ));

        let mut doc = e0_doc();
        doc.cohorts[1].id = "A1".into();
        assert_eq!(
            validate_economy(&doc),
            Err(ModelError::DuplicateCohortId("A1".into()))
        );

        let mut doc = e0_doc();
        doc.cohorts[0].endowment = vec!["0".into()];
        assert!(matches!(
            validate_economy(&doc),
            Err(ModelError::LengthMismatch { .. })
        ));

        let mut doc = e0_doc();
        doc.cohorts[0].endowment = vec!["0.5".into(), "1".into()];
        assert!(matches!(
            validate_economy(&doc),
            Err(ModelError::MalformedRational { .. })
        ));

        let mut doc = e0_doc();
        doc.cohorts.clear();
        assert_eq!(validate_economy(&doc), Err(ModelError::EmptyEconomy));
    }

    #[test]
    fn violations_are_all_listed() {
        let mut doc = e0_doc();
        doc.cohorts[0].mass = "-1".into();
        doc.cohorts[1].utility = vec!["1/2".into(), "1/4".into()];
        let kinds: Vec<_> = document_violations(&doc).iter().map(|e| e.kind()).collect();
        assert_eq!(kinds, vec!["NonPositiveMass", "WeightsNotNormalized"]);
    }

    #[test]
    fn aggregate_endowment_examples() {
        let e = validate_economy(&e0_doc()).unwrap();
        assert_eq!(e.aggregate_endowment(), b(&[(1, 1), (1, 1)]));

        let mut doc = e0_doc();
        doc.cohorts[0].mass = "1/2".into();
        doc.cohorts[0].endowment = vec!["0".into(), "2".into()];
        let e = validate_economy(&doc).unwrap();
        assert_eq!(e.aggregate_endowment(), b(&[(1, 1), (1, 1)]));

        let single = Economy::new(
            2,
            vec![Cohort {
                id: "S".into(),
                atomic: false,
                mass: int(3),
                endowment: b(&[(1, 1), (2, 1)]),
                utility: UtilityWeights::new(vec![frac(1, 2), frac(1, 2)]).unwrap(),
            }],
        )
        .unwrap();
        assert_eq!(single.aggregate_endowment(), b(&[(3, 1), (6, 1)]));
    }

    #[test]
    fn feasibility_examples() {
        let e = validate_economy(&e0_doc()).unwrap();
        let alloc = |x1: &[(i64, i64)], x2: &[(i64, i64)]| {
            Allocation::from_pairs([("A1", b(x1)), ("C2", b(x2))])
        };
        let exact = FeasibilityMode::Exact;
        assert!(e
            .is_feasible(&alloc(&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]), exact)
            .unwrap());
        assert!(e
            .is_feasible(&alloc(&[(1, 1), (2, 3)], &[(0, 1), (1, 3)]), exact)
            .unwrap());
        assert!(!e
            .is_feasible(&alloc(&[(3, 1), (0, 1)], &[(0, 1), (1, 1)]), exact)
            .unwrap());
        let under = alloc(&[(1, 2), (0, 1)], &[(0, 1), (1, 1)]);
        assert!(!e.is_feasible(&under, exact).unwrap());
        assert!(e
            .is_feasible(&under, FeasibilityMode::FreeDisposal)
            .unwrap());

        let missing = Allocation::from_pairs([("A1", b(&[(1, 1), (0, 1)]))]);
        assert!(matches!(
            e.is_feasible(&missing, exact),
            Err(ModelError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn utility_examples() {
        let e = validate_economy(&e0_doc()).unwrap();
        let a1 = e.cohort("A1").unwrap();
        let c2 = e.cohort("C2").unwrap();
        assert_eq!(utility(a1, &b(&[(0, 1), (1, 1)])).unwrap(), frac(1, 4));
        assert_eq!(utility(a1, &b(&[(1, 1), (2, 3)])).unwrap(), frac(11, 12));
        assert_eq!(utility(c2, &b(&[(0, 1), (1, 3)])).unwrap(), frac(1, 4));
        assert!(utility(c2, &b(&[(0, 1)])).is_err());
    }

    #[test]
    fn document_round_trip() {
        let e = validate_economy(&e0_doc()).unwrap();
        let text = e.to_json();
        let again = parse_economy_json(&text).unwrap().unwrap();
        assert_eq!(e, again);
    }
}
