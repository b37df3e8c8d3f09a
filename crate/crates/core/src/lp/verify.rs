//! Substitution checks for LP certificates. Nothing here solves anything;
//! every function only evaluates the certificate against the problem data.

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{LinearProgram, LpOutcome, Relation};
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("vector has length {found}, expected {expected}")]
    Length { expected: usize, found: usize },
    #[error("column {0} violates its bounds")]
    Bound(usize),
    #[error("row {0} is violated")]
    Row(usize),
    #[error("multiplier for row {0} has the wrong sign")]
    Sign(usize),
    #[error("reduced cost of column {0} pushes against an infinite bound")]
    DualInfeasible(usize),
    #[error("reported value does not equal objective at the primal point")]
    Value,
    #[error("dual objective {dual} differs from primal value {primal}")]
    DualityGap { primal: String, dual: String },
    #[error("complementary slackness fails at {0}")]
    Slackness(String),
    #[error("multipliers do not prove infeasibility")]
    NotFarkas,
    #[error("ray violates the recession cone at {0}")]
    RayDirection(String),
    #[error("ray does not strictly improve the objective")]
    RayNotImproving,
}

fn expect_len(v: &[Rational], n: usize) -> Result<(), VerifyError> {
    if v.len() != n {
        return Err(VerifyError::Length {
            expected: n,
            found: v.len(),
        });
    }
    Ok(())
}

fn sign_ok(relation: Relation, y: &Rational) -> bool {
    match relation {
        Relation::Le => !y.is_negative(),
        Relation::Ge => !y.is_positive(),
        Relation::Eq => true,
    }
}

/// `Aᵀy`, the row combination selected by the multipliers.
fn combine_rows(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut g = vec![Rational::zero(); lp.num_vars()];
    for (row, yi) in lp.rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (gj, a) in g.iter_mut().zip(&row.coefficients) {
            *gj += yi * a;
        }
    }
    g
}

/// Checks that `x` satisfies every bound and row exactly.
pub fn check_point(lp: &LinearProgram, x: &[Rational]) -> Result<(), VerifyError> {
    expect_len(x, lp.num_vars())?;
    for (j, xj) in x.iter().enumerate() {
        let below = lp.lower[j].as_ref().is_some_and(|l| xj < l);
        let above = lp.upper[j].as_ref().is_some_and(|u| xj > u);
        if below || above {
            return Err(VerifyError::Bound(j));
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let lhs = dot(&row.coefficients, x);
        let ok = match row.relation {
            Relation::Le => lhs <= row.rhs,
            Relation::Eq => lhs == row.rhs,
            Relation::Ge => lhs >= row.rhs,
        };
        if !ok {
            return Err(VerifyError::Row(i));
        }
    }
    Ok(())
}

/// Checks that `y` is dual feasible and returns its dual objective, an upper
/// bound on the maximum of the program.
pub fn dual_bound(lp: &LinearProgram, y: &[Rational]) -> Result<Rational, VerifyError> {
    expect_len(y, lp.rows.len())?;
    for (i, (row, yi)) in lp.rows.iter().zip(y).enumerate() {
        if !sign_ok(row.relation, yi) {
            return Err(VerifyError::Sign(i));
        }
    }
    let g = combine_rows(lp, y);
    let mut bound: Rational = lp.rows.iter().zip(y).map(|(r, yi)| yi * &r.rhs).sum();
    for (j, (cj, gj)) in lp.objective.iter().zip(&g).enumerate() {
        let reduced = cj - gj;
        if reduced.is_positive() {
            match &lp.upper[j] {
                Some(u) => bound += &reduced * u,
                None => return Err(VerifyError::DualInfeasible(j)),
            }
        } else if reduced.is_negative() {
            match &lp.lower[j] {
                Some(l) => bound += &reduced * l,
                None => return Err(VerifyError::DualInfeasible(j)),
            }
        }
    }
    Ok(bound)
}

/// Checks an optimal pair: primal feasibility, reported value, zero duality
/// gap and complementary slackness.
pub fn verify_optimal(
    lp: &LinearProgram,
    primal: &[Rational],
    value: &Rational,
    dual: &[Rational],
) -> Result<(), VerifyError> {
    check_point(lp, primal)?;
    if dot(&lp.objective, primal) != *value {
        return Err(VerifyError::Value);
    }
    let bound = dual_bound(lp, dual)?;
    if bound != *value {
        return Err(VerifyError::DualityGap {
            primal: value.to_string(),
            dual: bound.to_string(),
        });
    }
    for (i, (row, yi)) in lp.rows.iter().zip(dual).enumerate() {
        if !yi.is_zero() && dot(&row.coefficients, primal) != row.rhs {
            return Err(VerifyError::Slackness(format!("row {i}")));
        }
    }
    let g = combine_rows(lp, dual);
    for (j, ((cj, gj), xj)) in lp.objective.iter().zip(&g).zip(primal).enumerate() {
        let reduced = cj - gj;
        let tight = if reduced.is_positive() {
            lp.upper[j].as_ref() == Some(xj)
        } else if reduced.is_negative() {
            lp.lower[j].as_ref() == Some(xj)
        } else {
            true
        };
        if !tight {
            return Err(VerifyError::Slackness(format!("column {j}")));
        }
    }
    Ok(())
}

/// Checks a Farkas certificate: with `g = Aᵀy`, every feasible `x` would
/// satisfy `g·x ≤ y·b`, yet the minimum of `g·x` over the bound box exceeds
/// `y·b`.
pub fn verify_farkas(lp: &LinearProgram, y: &[Rational]) -> Result<(), VerifyError> {
    expect_len(y, lp.rows.len())?;
    for (i, (row, yi)) in lp.rows.iter().zip(y).enumerate() {
        if !sign_ok(row.relation, yi) {
            return Err(VerifyError::Sign(i));
        }
    }
    let g = combine_rows(lp, y);
    let rhs: Rational = lp.rows.iter().zip(y).map(|(r, yi)| yi * &r.rhs).sum();
    let mut box_min = Rational::zero();
    for (j, gj) in g.iter().enumerate() {
        if gj.is_positive() {
            match &lp.lower[j] {
                Some(l) => box_min += gj * l,
                None => return Err(VerifyError::NotFarkas),
            }
        } else if gj.is_negative() {
            match &lp.upper[j] {
                Some(u) => box_min += gj * u,
                None => return Err(VerifyError::NotFarkas),
            }
        }
    }
    if box_min > rhs {
        Ok(())
    } else {
        Err(VerifyError::NotFarkas)
    }
}

/// Checks that `point` is feasible and that `point + t·ray` stays feasible
/// for all `t ≥ 0` while the objective grows without bound.
pub fn verify_ray(
    lp: &LinearProgram,
    point: &[Rational],
    ray: &[Rational],
) -> Result<(), VerifyError> {
    check_point(lp, point)?;
    expect_len(ray, lp.num_vars())?;
    for (j, rj) in ray.iter().enumerate() {
        if (rj.is_positive() && lp.upper[j].is_some())
            || (rj.is_negative() && lp.lower[j].is_some())
        {
            return Err(VerifyError::RayDirection(format!("column {j}")));
        }
    }
    for (i, row) in lp.rows.iter().enumerate() {
        let d = dot(&row.coefficients, ray);
        let ok = match row.relation {
            Relation::Le => !d.is_positive(),
            Relation::Eq => d.is_zero(),
            Relation::Ge => !d.is_negative(),
        };
        if !ok {
            return Err(VerifyError::RayDirection(format!("row {i}")));
        }
    }
    if !dot(&lp.objective, ray).is_positive() {
        return Err(VerifyError::RayNotImproving);
    }
    Ok(())
}

pub fn verify_outcome(lp: &LinearProgram, outcome: &LpOutcome) -> Result<(), VerifyError> {
    match outcome {
        LpOutcome::Optimal(s) => verify_optimal(lp, &s.primal, &s.value, &s.dual),
        LpOutcome::Infeasible(c) => verify_farkas(lp, &c.multipliers),
        LpOutcome::Unbounded(r) => verify_ray(lp, &r.point, &r.ray),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn simple() -> LinearProgram {
        // max x0 + x1, x0 + 2 x1 ≤ 4, x ≥ 0
        let mut lp = LinearProgram::nonnegative(2);
        lp.objective = vec![int(1), int(1)];
        lp.add_row(vec![int(1), int(2)], Relation::Le, int(4));
        lp
    }

    #[test]
    fn rejects_wrong_dual_sign() {
        assert_eq!(dual_bound(&simple(), &[int(-1)]), Err(VerifyError::Sign(0)));
    }

    #[test]
    fn dual_bound_is_an_upper_bound() {
        // y = 1 gives reduced costs (0, -1) and bound 4.
        assert_eq!(dual_bound(&simple(), &[int(1)]).unwrap(), int(4));
        // y = 1/2 leaves a positive reduced cost on an unbounded column.
        assert!(dual_bound(&simple(), &[Rational::new(1.into(), 2.into())]).is_err());
    }

    #[test]
    fn tampered_optimum_rejected() {
        let lp = simple();
        assert!(verify_optimal(&lp, &[int(4), int(0)], &int(4), &[int(1)]).is_ok());
        assert_eq!(
            verify_optimal(&lp, &[int(3), int(0)], &int(3), &[int(1)]),
            Err(VerifyError::DualityGap {
                primal: "3".into(),
                dual: "4".into()
            })
        );
        assert_eq!(
            verify_optimal(&lp, &[int(5), int(0)], &int(5), &[int(1)]),
            Err(VerifyError::Row(0))
        );
    }

    #[test]
    fn farkas_needs_strict_separation() {
        // x ≤ 0 with x ≥ 0: feasible, so no certificate can exist.
        let mut lp = LinearProgram::nonnegative(1);
        lp.add_row(vec![int(1)], Relation::Le, int(0));
        assert_eq!(verify_farkas(&lp, &[int(1)]), Err(VerifyError::NotFarkas));
    }

    #[test]
    fn ray_must_improve() {
        let lp = simple();
        assert!(verify_ray(&lp, &[int(0), int(0)], &[int(-2), int(1)]).is_err());
    }
}
