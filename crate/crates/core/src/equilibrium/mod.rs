//! Core and competitive analysis: Pareto optimality, competitive checks and
//! search, the atom-optimal core allocation, blocking coalitions, rescaling,
//! and the non-competitive-core certificate.

mod blocking;
mod certificate;
mod competitive;
mod core_max;
mod pareto;
mod rescale;

use thiserror::Error;

use crate::economy::ModelError;
use crate::lp::LpError;
use crate::preference::PreferenceError;

pub use blocking::{
    blocking_lp, find_blocking_coalition, scan_blocking, BlockingWitness, PatternResult,
};
pub use certificate::{
    certify_noncompetitive_core, verify_certificate, Counterevidence, Hypothesis,
    NoncompetitivenessCertificate, ScanEntry,
};
pub use competitive::{
    check_competitive, decentralization_lp, decentralizing_prices, find_equilibrium,
    CompetitiveCheck, CompetitiveEquilibrium, Decentralization, Violation, ViolationKind,
    MAX_EQUILIBRIUM_GOODS,
};
pub use core_max::{core_max_allocation, core_max_lp, CoreMax};
pub use pareto::{pareto_check, supporting_price, welfare_maximizing_allocation, ParetoCheck};
pub use rescale::{rescale, transport_allocation, Lambda};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Preference(#[from] PreferenceError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("initial allocation is not Pareto optimal")]
    NotParetoOptimal,
    #[error("unsupported economy shape: {0}")]
    UnsupportedShape(String),
    #[error("allocation is not feasible")]
    NotFeasible,
    #[error("rescaling factor for cohort {0:?} must be strictly positive")]
    NonPositiveLambda(String),
    #[error("no rescaling factor given for cohort {0:?}")]
    MissingLambda(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(Hypothesis),
    #[error("certification failed: {0}")]
    CertificationFailure(Box<Counterevidence>),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}
