//! Exact linear programming over rationals.
//!
//! Problems are stated as `maximize c·x` subject to rows `a_i·x (≤|=|≥) b_i`
//! and column bounds `l_j ≤ x_j ≤ u_j` (either side may be infinite). The
//! solver is a dense two-phase simplex using Bland's rule, so it terminates
//! and is deterministic. Every outcome carries a certificate that is checked
//! by substitution before it is returned:
//!
//! * `Optimal`: a primal point and one multiplier per row whose dual
//!   objective equals the primal value.
//! * `Infeasible`: row multipliers `y` (a Farkas vector) such that the
//!   implied inequality `(Aᵀy)·x ≤ y·b` cannot hold anywhere in the box.
//! * `Unbounded`: a feasible point and an improving recession ray.

mod simplex;
pub mod verify;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{serde_rational, serde_rational_opt_vec, serde_rational_vec, Rational};

pub use verify::{check_point, dual_bound, verify_farkas, verify_outcome, verify_ray, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "serde_rational_vec")]
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    #[serde(with = "serde_rational")]
    pub rhs: Rational,
}

/// `maximize objective·x` subject to `rows` and the column bounds. `None`
/// bounds are infinite.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearProgram {
    #[serde(with = "serde_rational_vec")]
    pub objective: Vec<Rational>,
    #[serde(with = "serde_rational_opt_vec")]
    pub lower: Vec<Option<Rational>>,
    #[serde(with = "serde_rational_opt_vec")]
    pub upper: Vec<Option<Rational>>,
    pub rows: Vec<Constraint>,
}

impl LinearProgram {
    /// `n` variables with `x ≥ 0`, zero objective and no rows.
    pub fn nonnegative(n: usize) -> Self {
        LinearProgram {
            objective: vec![Rational::from_integer(0.into()); n],
            lower: vec![Some(Rational::from_integer(0.into())); n],
            upper: vec![None; n],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        self.rows.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<Rational>, upper: Option<Rational>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    /// Checks dimensions and bound ordering.
    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{n} objective coefficients but {} lower / {} upper bounds",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(LpError::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coefficients.len()
                )));
            }
        }
        for j in 0..n {
            if let (Some(l), Some(u)) = (&self.lower[j], &self.upper[j]) {
                if l > u {
                    return Err(LpError::DimensionMismatch(format!(
                        "column {j} has lower bound above upper bound"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalSolution {
    #[serde(with = "serde_rational_vec")]
    pub primal: Vec<Rational>,
    #[serde(with = "serde_rational")]
    pub value: Rational,
    /// One multiplier per row: `≥ 0` on `≤` rows, `≤ 0` on `≥` rows.
    #[serde(with = "serde_rational_vec")]
    pub dual: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    /// One multiplier per row, with the same sign conventions as duals.
    #[serde(with = "serde_rational_vec")]
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnboundedRay {
    #[serde(with = "serde_rational_vec")]
    pub point: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub ray: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible(_) => LpStatus::Infeasible,
            LpOutcome::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn optimal(&self) -> Option<&OptimalSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The solver produced an outcome whose certificate did not check.
    #[error("internal solver error: certificate failed verification: {0}")]
    Verification(#[from] VerifyError),
}

/// Solves `lp` exactly and re-verifies the outcome before returning it.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    let outcome = simplex::solve(lp, true);
    verify_outcome(lp, &outcome)?;
    Ok(outcome)
}

/// Finds a point satisfying every row and bound, ignoring the objective, or
/// a Farkas certificate that none exists.
pub fn feasibility(lp: &LinearProgram) -> Result<Feasibility, LpError> {
    lp.validate()?;
    match simplex::solve(lp, false) {
        LpOutcome::Optimal(s) => {
            check_point(lp, &s.primal)?;
            Ok(Feasibility::Feasible(s.primal))
        }
        LpOutcome::Infeasible(cert) => {
            verify_farkas(lp, &cert.multipliers)?;
            Ok(Feasibility::Infeasible(cert))
        }
        LpOutcome::Unbounded(_) => unreachable!("phase one never reports unboundedness"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn one_var(lower: Option<i64>, upper: Option<i64>) -> LinearProgram {
        let mut lp = LinearProgram::nonnegative(1);
        lp.objective = vec![int(1)];
        lp.set_bounds(0, lower.map(int), upper.map(int));
        lp
    }

    #[test]
    fn bounded_maximum() {
        let mut lp = one_var(Some(0), None);
        lp.add_row(vec![int(1)], Relation::Le, frac(3, 4));
        let out = solve_lp(&lp).unwrap();
        let s = out.optimal().unwrap();
        assert_eq!(s.value, frac(3, 4));
        assert_eq!(s.primal, vec![frac(3, 4)]);
        assert_eq!(s.dual, vec![int(1)]);
    }

    #[test]
    fn contradictory_row_and_bound() {
        let mut lp = one_var(Some(0), None);
        lp.add_row(vec![int(1)], Relation::Le, int(-1));
        match solve_lp(&lp).unwrap() {
            LpOutcome::Infeasible(cert) => {
                assert_eq!(cert.multipliers.len(), 1);
                assert!(cert.multipliers[0] > int(0));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_with_unit_ray() {
        let lp = one_var(Some(0), None);
        match solve_lp(&lp).unwrap() {
            LpOutcome::Unbounded(r) => assert_eq!(r.ray, vec![int(1)]),
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn feasibility_examples() {
        let mut lp = LinearProgram::nonnegative(1);
        lp.add_row(vec![int(1)], Relation::Eq, frac(1, 2));
        assert_eq!(
            feasibility(&lp).unwrap(),
            Feasibility::Feasible(vec![frac(1, 2)])
        );

        let mut lp = LinearProgram::nonnegative(1);
        lp.lower[0] = None;
        lp.add_row(vec![int(1)], Relation::Ge, int(1));
        lp.add_row(vec![int(1)], Relation::Le, int(0));
        assert!(matches!(
            feasibility(&lp).unwrap(),
            Feasibility::Infeasible(_)
        ));

        let mut lp = LinearProgram::nonnegative(2);
        lp.add_row(vec![int(1), int(1)], Relation::Eq, int(1));
        match feasibility(&lp).unwrap() {
            Feasibility::Feasible(x) => {
                assert_eq!(&x[0] + &x[1], int(1));
                assert!(x.iter().all(|v| *v >= int(0)));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn crossed_bounds_rejected() {
        let lp = one_var(Some(2), Some(1));
        assert!(matches!(solve_lp(&lp), Err(LpError::DimensionMismatch(_))));
        let mut lp = one_var(Some(0), None);
        lp.add_row(vec![int(1), int(1)], Relation::Le, int(1));
        assert!(matches!(solve_lp(&lp), Err(LpError::DimensionMismatch(_))));
    }

    #[test]
    fn free_and_upper_bounded_columns() {
        // max x0 - x1 with x0 ≤ 2 (upper only), x1 free, x1 ≥ -3 as a row.
        let mut lp = LinearProgram::nonnegative(2);
        lp.objective = vec![int(1), int(-1)];
        lp.set_bounds(0, None, Some(int(2)));
        lp.set_bounds(1, None, None);
        lp.add_row(vec![int(0), int(1)], Relation::Ge, int(-3));
        let s = solve_lp(&lp).unwrap().optimal().cloned().unwrap();
        assert_eq!(s.primal, vec![int(2), int(-3)]);
        assert_eq!(s.value, int(5));
    }

    #[test]
    fn boxed_column_hits_upper_bound() {
        let mut lp = LinearProgram::nonnegative(2);
        lp.objective = vec![int(2), int(1)];
        lp.set_bounds(0, Some(int(1)), Some(int(3)));
        lp.add_row(vec![int(1), int(1)], Relation::Le, int(5));
        let s = solve_lp(&lp).unwrap().optimal().cloned().unwrap();
        assert_eq!(s.primal, vec![int(3), int(2)]);
        assert_eq!(s.value, int(8));
    }

    #[test]
    fn deterministic_outcomes() {
        let mut lp = LinearProgram::nonnegative(3);
        lp.objective = vec![int(1), int(1), int(1)];
        lp.add_row(vec![int(1), int(1), int(1)], Relation::Le, int(1));
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a, b);
    }
}
