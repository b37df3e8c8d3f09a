//! Exact analysis of finite-type linear exchange economies with atoms.
//!
//! An economy is a list of cohorts. Each cohort is either a single atom (a
//! large agent) or an atomless continuum of identical consumers, with a
//! per-capita endowment and linear utility weights. All arithmetic is exact.
//!
//! The [`equilibrium`] module computes Pareto, competitive and core objects;
//! [`equilibrium::certify_noncompetitive_core`] produces an independently
//! checkable certificate that a two-type economy with a unique-type atom has
//! a core allocation no price system supports.

pub mod campaign;
pub mod economy;
pub mod equilibrium;
pub mod fixtures;
pub mod lp;
pub mod preference;
pub mod random;
pub mod rational;
pub mod summary;

pub use economy::{
    Allocation, Bundle, Cohort, Economy, FeasibilityMode, ModelError, UtilityWeights,
};
pub use equilibrium::AnalysisError;
pub use preference::PriceSystem;
pub use rational::Rational;
