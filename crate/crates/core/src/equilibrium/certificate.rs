//! Certificates that an economy has a core allocation no price system can
//! support, checkable by substitution without running the solver.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::blocking::{blocking_lp, find_blocking_coalition, scan_blocking, BlockingWitness};
use super::competitive::{decentralization_lp, decentralizing_prices, Decentralization};
use super::core_max::{core_max_allocation, core_max_lp};
use super::pareto::{pareto_check, ParetoCheck};
use super::AnalysisError;
use crate::economy::{
    utility, validate_economy, Allocation, AllocationDocument, Economy, EconomyDocument,
    FeasibilityMode,
};
use crate::lp::{check_point, dual_bound, verify_farkas, FarkasCertificate};
use crate::preference::PriceSystem;
use crate::rational::{serde_rational, serde_rational_vec, Rational};

/// Scope statement recorded in every certificate.
pub const COALITION_SCOPE: &str = "cohort-symmetric coalitions: any subset of atoms at full mass, \
any measure of each atomless cohort, equal treatment within each participating cohort";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Exactly two cohorts of distinct types.
    TwoType,
    /// Some atom's type is shared by no other cohort.
    Unbalanced,
    /// The initial allocation is not Pareto optimal.
    NonTrivial,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::TwoType => "two-type (exactly two cohorts of distinct types)",
            Hypothesis::Unbalanced => "unbalanced (an atom whose type no other cohort shares)",
            Hypothesis::NonTrivial => "non-trivial (initial allocation must not be Pareto optimal)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Counterevidence {
    Blocked(BlockingWitness),
    Decentralized(PriceSystem),
    CertificateRejected(String),
}

impl fmt::Display for Counterevidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterevidence::Blocked(w) => write!(
                f,
                "core-max allocation is blocked (atoms {:?}, fractions {:?})",
                w.included_atoms,
                w.fractions.keys().collect::<Vec<_>>()
            ),
            Counterevidence::Decentralized(p) => write!(
                f,
                "core-max allocation is supported by price {:?}",
                p.iter().map(|q| q.to_string()).collect::<Vec<_>>()
            ),
            Counterevidence::CertificateRejected(why) => {
                write!(f, "certificate failed self-check: {why}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NontrivialityWitness {
    /// A feasible reallocation improving every cohort over `ω`.
    pub improvement: AllocationDocument,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub members: Vec<String>,
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    /// Row multipliers bounding the pattern's gain from above by `delta`.
    #[serde(with = "serde_rational_vec")]
    pub dual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoncompetitivenessCertificate {
    pub economy: EconomyDocument,
    pub atom: String,
    pub core_allocation: AllocationDocument,
    #[serde(with = "serde_rational")]
    pub core_value: Rational,
    #[serde(with = "serde_rational_vec")]
    pub core_max_dual: Vec<Rational>,
    pub nontriviality: NontrivialityWitness,
    pub blocking_scan: Vec<ScanEntry>,
    pub decentralization: FarkasCertificate,
    pub coalition_scope: String,
}

fn check_hypotheses(e: &Economy) -> Result<ParetoCheck, AnalysisError> {
    let cohorts = e.cohorts();
    if cohorts.len() != 2 || cohorts[0].same_type(&cohorts[1]) {
        return Err(AnalysisError::HypothesisViolation(Hypothesis::TwoType));
    }
    if !cohorts.iter().any(|c| c.atomic) {
        return Err(AnalysisError::HypothesisViolation(Hypothesis::Unbalanced));
    }
    let pareto = pareto_check(e)?;
    if pareto.optimal {
        return Err(AnalysisError::HypothesisViolation(Hypothesis::NonTrivial));
    }
    Ok(pareto)
}

fn failure(evidence: Counterevidence) -> AnalysisError {
    AnalysisError::CertificationFailure(Box::new(evidence))
}

/// Builds the atom-optimal core allocation, shows no cohort-symmetric
/// coalition blocks it and that no price supports it, and packages the
/// evidence. Any failed step is reported as counterevidence.
pub fn certify_noncompetitive_core(
    e: &Economy,
) -> Result<NoncompetitivenessCertificate, AnalysisError> {
    let pareto = check_hypotheses(e)?;
    let core = core_max_allocation(e)?;
    let x = &core.allocation;

    let scan = scan_blocking(e, x)?;
    if scan.iter().any(|r| r.delta.is_positive()) {
        let witness = find_blocking_coalition(e, x)?.ok_or_else(|| {
            AnalysisError::Internal("positive blocking gain without witness".into())
        })?;
        return Err(failure(Counterevidence::Blocked(witness)));
    }
    let farkas = match decentralizing_prices(e, x)? {
        Decentralization::Price(p) => return Err(failure(Counterevidence::Decentralized(p))),
        Decentralization::Infeasible(cert) => cert,
    };

    let cert = NoncompetitivenessCertificate {
        economy: e.to_document(),
        atom: core.atom.clone(),
        core_allocation: x.to_document(),
        core_value: core.value.clone(),
        core_max_dual: core.dual.clone(),
        nontriviality: NontrivialityWitness {
            improvement: pareto
                .improvement
                .expect("non-trivial economies have an improvement")
                .to_document(),
            delta: pareto.delta,
        },
        blocking_scan: scan
            .into_iter()
            .map(|r| ScanEntry {
                members: r.members,
                delta: r.delta,
                dual: r.solution.dual,
            })
            .collect(),
        decentralization: farkas,
        coalition_scope: COALITION_SCOPE.to_string(),
    };
    verify_certificate(&cert, e)
        .map_err(|why| failure(Counterevidence::CertificateRejected(why)))?;
    Ok(cert)
}

/// Re-checks a certificate against `e` by substitution only: hypotheses via
/// the recorded improvement, optimality of the core value via its dual, an
/// upper bound `≤ 0` on every pattern's blocking gain, and the Farkas vector
/// for the price system. Returns a description of the first failed check.
pub fn verify_certificate(cert: &NoncompetitivenessCertificate, e: &Economy) -> Result<(), String> {
    let recorded = validate_economy(&cert.economy)
        .map_err(|err| format!("embedded economy invalid: {err}"))?;
    if recorded != *e {
        return Err("embedded economy differs from the given economy".into());
    }
    let cohorts = e.cohorts();
    if cohorts.len() != 2 || cohorts[0].same_type(&cohorts[1]) {
        return Err(format!("hypothesis fails: {}", Hypothesis::TwoType));
    }
    let atom_index = cohorts
        .iter()
        .position(|c| c.atomic)
        .ok_or("no atomic cohort")?;
    if cohorts[atom_index].id != cert.atom {
        return Err(format!(
            "certificate favours {:?}, expected {:?}",
            cert.atom, cohorts[atom_index].id
        ));
    }

    let improvement = Allocation::from_document(&cert.nontriviality.improvement)
        .map_err(|err| err.to_string())?;
    if !e
        .is_feasible(&improvement, FeasibilityMode::Exact)
        .map_err(|err| err.to_string())?
        || !cert.nontriviality.delta.is_positive()
    {
        return Err("non-triviality witness is not a feasible strict improvement".into());
    }
    for c in cohorts {
        let gain = utility(c, &improvement.bundles[&c.id]).map_err(|err| err.to_string())?
            - utility(c, &c.endowment).map_err(|err| err.to_string())?;
        if gain < cert.nontriviality.delta {
            return Err(format!(
                "non-triviality witness does not improve {:?}",
                c.id
            ));
        }
    }

    let x = Allocation::from_document(&cert.core_allocation).map_err(|err| err.to_string())?;
    if !e
        .is_feasible(&x, FeasibilityMode::Exact)
        .map_err(|err| err.to_string())?
    {
        return Err("core allocation is not exactly feasible".into());
    }
    let l = e.commodities();
    let other = &cohorts[1 - atom_index];
    let mut point = x.bundles[&cert.atom].to_vec();
    point.extend(x.bundles[&other.id].iter().cloned());
    let core_lp = core_max_lp(e).map_err(|err| err.to_string())?;
    check_point(&core_lp, &point)
        .map_err(|err| format!("core allocation outside the core-max set: {err}"))?;
    if utility(&cohorts[atom_index], &point[..l]).map_err(|err| err.to_string())? != cert.core_value
    {
        return Err("core value does not match the atom's utility".into());
    }
    let bound =
        dual_bound(&core_lp, &cert.core_max_dual).map_err(|err| format!("core-max dual: {err}"))?;
    if bound != cert.core_value {
        return Err("core-max dual does not certify optimality".into());
    }

    let n = cohorts.len();
    if cert.blocking_scan.len() != (1 << n) - 1 {
        return Err(format!(
            "blocking scan covers {} patterns, expected {}",
            cert.blocking_scan.len(),
            (1 << n) - 1
        ));
    }
    for (index, entry) in cert.blocking_scan.iter().enumerate() {
        let mask = index + 1;
        let expected: Vec<&String> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &cohorts[i].id)
            .collect();
        if entry.members.iter().collect::<Vec<_>>() != expected {
            return Err(format!(
                "scan entry {index} lists {:?}, expected {:?}",
                entry.members, expected
            ));
        }
        if entry.delta.is_positive() {
            return Err(format!(
                "pattern {:?} blocks with gain {}",
                entry.members, entry.delta
            ));
        }
        let lp = blocking_lp(e, &x, mask).map_err(|err| err.to_string())?;
        let bound = dual_bound(&lp, &entry.dual)
            .map_err(|err| format!("pattern {:?}: {err}", entry.members))?;
        if bound != entry.delta {
            return Err(format!(
                "pattern {:?}: dual bound {bound} differs from recorded gain",
                entry.members
            ));
        }
    }

    let lp = decentralization_lp(e, &x).map_err(|err| err.to_string())?;
    verify_farkas(&lp, &cert.decentralization.multipliers)
        .map_err(|err| format!("price system: {err}"))?;
    Ok(())
}
