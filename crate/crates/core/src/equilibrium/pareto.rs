use num_traits::{One, Signed, Zero};

use super::competitive::check_competitive;
use super::AnalysisError;
use crate::economy::{Allocation, Bundle, Economy};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, OptimalSolution, Relation};
use crate::preference::PriceSystem;
use crate::rational::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParetoCheck {
    pub optimal: bool,
    /// Largest uniform utility gain `δ*` over `ω` available to the grand
    /// coalition.
    pub delta: Rational,
    /// An allocation attaining `δ*` when it is positive.
    pub improvement: Option<Allocation>,
}

/// Grand-coalition LP: variables `y_i` per cohort then a free `δ`;
/// `Σ mass_i y_i = ∫ω` and `a_i·y_i - δ ≥ a_i·ω_i`.
pub(crate) fn pareto_lp(e: &Economy) -> LinearProgram {
    let l = e.commodities();
    let n = e.cohorts().len();
    let delta = n * l;
    let mut lp = LinearProgram::nonnegative(delta + 1);
    lp.objective[delta] = Rational::one();
    lp.set_bounds(delta, None, None);
    let total = e.aggregate_endowment();
    for j in 0..l {
        let mut row = vec![Rational::zero(); delta + 1];
        for (i, c) in e.cohorts().iter().enumerate() {
            row[i * l + j] = c.mass.clone();
        }
        lp.add_row(row, Relation::Eq, total[j].clone());
    }
    for (i, c) in e.cohorts().iter().enumerate() {
        let mut row = vec![Rational::zero(); delta + 1];
        row[i * l..(i + 1) * l].clone_from_slice(&c.utility);
        row[delta] = -Rational::one();
        lp.add_row(row, Relation::Ge, dot(&c.utility, &c.endowment));
    }
    lp
}

fn solve_pareto(e: &Economy) -> Result<OptimalSolution, AnalysisError> {
    match solve_lp(&pareto_lp(e))? {
        LpOutcome::Optimal(s) => Ok(s),
        other => Err(AnalysisError::Internal(format!(
            "grand-coalition program is feasible and bounded, solver reported {:?}",
            other.status()
        ))),
    }
}

fn split_allocation(e: &Economy, primal: &[Rational]) -> Allocation {
    let l = e.commodities();
    Allocation::from_pairs(e.cohorts().iter().enumerate().map(|(i, c)| {
        let bundle =
            Bundle::new(primal[i * l..(i + 1) * l].to_vec()).expect("x ≥ 0 in the program");
        (c.id.clone(), bundle)
    }))
}

/// Tests whether the grand coalition can make every cohort strictly better
/// off than at `ω`.
pub fn pareto_check(e: &Economy) -> Result<ParetoCheck, AnalysisError> {
    let s = solve_pareto(e)?;
    let delta = s.value.clone();
    if delta.is_positive() {
        Ok(ParetoCheck {
            optimal: false,
            delta,
            improvement: Some(split_allocation(e, &s.primal)),
        })
    } else {
        Ok(ParetoCheck {
            optimal: true,
            delta,
            improvement: None,
        })
    }
}

/// A strictly positive price making `(p, ω)` competitive, read from the
/// resource-row multipliers of the grand-coalition program.
pub fn supporting_price(e: &Economy) -> Result<PriceSystem, AnalysisError> {
    let s = solve_pareto(e)?;
    if s.value.is_positive() {
        return Err(AnalysisError::NotParetoOptimal);
    }
    let raw = s.dual[..e.commodities()].to_vec();
    let price = PriceSystem::new(raw)?;
    let check = check_competitive(e, &price, &e.endowment_allocation())?;
    if !check.ok {
        return Err(AnalysisError::Internal(format!(
            "dual price does not support the endowment: {:?}",
            check.violations
        )));
    }
    Ok(price)
}

/// Maximizes `Σ θ_i mass_i a_i·x_i` over exactly feasible allocations. The
/// result is Pareto optimal for any strictly positive welfare weights `θ`.
pub fn welfare_maximizing_allocation(
    e: &Economy,
    welfare_weights: &[Rational],
) -> Result<Allocation, AnalysisError> {
    let l = e.commodities();
    let n = e.cohorts().len();
    if welfare_weights.len() != n || welfare_weights.iter().any(|w| !w.is_positive()) {
        return Err(AnalysisError::UnsupportedShape(
            "welfare weights must be strictly positive, one per cohort".into(),
        ));
    }
    let mut lp = LinearProgram::nonnegative(n * l);
    for (i, c) in e.cohorts().iter().enumerate() {
        for j in 0..l {
            lp.objective[i * l + j] = &welfare_weights[i] * &c.mass * &c.utility[j];
        }
    }
    let total = e.aggregate_endowment();
    for j in 0..l {
        let mut row = vec![Rational::zero(); n * l];
        for (i, c) in e.cohorts().iter().enumerate() {
            row[i * l + j] = c.mass.clone();
        }
        lp.add_row(row, Relation::Eq, total[j].clone());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal(s) => Ok(split_allocation(e, &s.primal)),
        other => Err(AnalysisError::Internal(format!(
            "welfare program reported {:?}",
            other.status()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{alloc, e0, e1, single_cohort};
    use crate::rational::{frac, vec_frac};

    #[test]
    fn e0_is_not_pareto_optimal() {
        let check = pareto_check(&e0()).unwrap();
        assert!(!check.optimal);
        assert_eq!(check.delta, frac(1, 2));
        assert_eq!(
            check.improvement.unwrap(),
            alloc(&[("A1", &[(1, 1), (0, 1)]), ("C2", &[(0, 1), (1, 1)])])
        );
    }

    #[test]
    fn e1_is_pareto_optimal() {
        let check = pareto_check(&e1()).unwrap();
        assert!(check.optimal);
        assert_eq!(check.delta, frac(0, 1));
    }

    #[test]
    fn identical_weights_are_pareto_optimal() {
        let mut e = e0().to_document();
        e.cohorts[1].utility = e.cohorts[0].utility.clone();
        let e = crate::economy::validate_economy(&e).unwrap();
        assert!(pareto_check(&e).unwrap().optimal);
    }

    #[test]
    fn e1_supporting_price_in_interval() {
        let p = supporting_price(&e1()).unwrap();
        let ratio = &p[0] / &p[1];
        assert!(ratio >= frac(1, 3) && ratio <= frac(3, 1), "ratio {ratio}");
    }

    #[test]
    fn single_cohort_supported_by_own_weights() {
        let e = single_cohort();
        let p = supporting_price(&e).unwrap();
        assert_eq!(p.as_slice(), e.cohorts()[0].utility.as_slice());
    }

    #[test]
    fn not_pareto_optimal_is_an_error() {
        assert_eq!(
            supporting_price(&e0()),
            Err(AnalysisError::NotParetoOptimal)
        );
    }

    #[test]
    fn welfare_allocation_is_pareto_optimal() {
        let e = e0();
        let x = welfare_maximizing_allocation(&e, &vec_frac(&[(1, 1), (2, 1)])).unwrap();
        assert!(e
            .is_feasible(&x, crate::economy::FeasibilityMode::Exact)
            .unwrap());
        let mut doc = e.to_document();
        for c in doc.cohorts.iter_mut() {
            c.endowment = x.bundles[&c.id].iter().map(|q| q.to_string()).collect();
        }
        let moved = crate::economy::validate_economy(&doc).unwrap();
        assert!(pareto_check(&moved).unwrap().optimal);
    }
}
