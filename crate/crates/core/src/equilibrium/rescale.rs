use std::collections::BTreeMap;

use num_traits::Signed;

use super::AnalysisError;
use crate::economy::{Allocation, Cohort, Economy, ModelError};
use crate::rational::Rational;

/// Positive rescaling factor per cohort id.
pub type Lambda = BTreeMap<String, Rational>;

fn factor<'a>(lambda: &'a Lambda, id: &str) -> Result<&'a Rational, AnalysisError> {
    let f = lambda
        .get(id)
        .ok_or_else(|| AnalysisError::MissingLambda(id.to_string()))?;
    if !f.is_positive() {
        return Err(AnalysisError::NonPositiveLambda(id.to_string()));
    }
    Ok(f)
}

fn check_keys<'a>(
    lambda: &Lambda,
    ids: impl Iterator<Item = &'a String> + Clone,
) -> Result<(), AnalysisError> {
    for key in lambda.keys() {
        if !ids.clone().any(|id| id == key) {
            return Err(ModelError::UnknownCohort(key.clone()).into());
        }
    }
    Ok(())
}

/// Multiplies each cohort's endowment by `λ_i` and divides its mass by
/// `λ_i`. Utility weights are unchanged: scaling both sides of a linear
/// comparison preserves it. Aggregates are therefore invariant.
pub fn rescale(e: &Economy, lambda: &Lambda) -> Result<Economy, AnalysisError> {
    check_keys(lambda, e.cohorts().iter().map(|c| &c.id))?;
    let cohorts = e
        .cohorts()
        .iter()
        .map(|c| {
            let f = factor(lambda, &c.id)?;
            Ok(Cohort {
                id: c.id.clone(),
                atomic: c.atomic,
                mass: &c.mass / f,
                endowment: c.endowment.scaled(f),
                utility: c.utility.clone(),
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    Ok(Economy::new(e.commodities(), cohorts)?)
}

/// The map `x ↦ λx` carrying allocations of `E` to allocations of the
/// rescaled economy.
pub fn transport_allocation(x: &Allocation, lambda: &Lambda) -> Result<Allocation, AnalysisError> {
    check_keys(lambda, x.bundles.keys())?;
    let bundles = x
        .bundles
        .iter()
        .map(|(id, b)| Ok((id.clone(), b.scaled(factor(lambda, id)?))))
        .collect::<Result<BTreeMap<_, _>, AnalysisError>>()?;
    Ok(Allocation { bundles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{alloc, e0};
    use crate::rational::{frac, int};

    fn lambda(pairs: &[(&str, Rational)]) -> Lambda {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect()
    }

    #[test]
    fn rescale_atom_by_two() {
        let e = e0();
        let r = rescale(&e, &lambda(&[("A1", int(2)), ("C2", int(1))])).unwrap();
        let a1 = r.cohort("A1").unwrap();
        assert_eq!(a1.mass, frac(1, 2));
        assert_eq!(a1.endowment.as_slice(), &[int(0), int(2)]);
        assert_eq!(r.cohort("C2"), e.cohort("C2"));
        assert_eq!(r.aggregate_endowment(), e.aggregate_endowment());
    }

    #[test]
    fn identity_and_inverse() {
        let e = e0();
        let one = lambda(&[("A1", int(1)), ("C2", int(1))]);
        assert_eq!(rescale(&e, &one).unwrap(), e);
        let l = lambda(&[("A1", frac(3, 7)), ("C2", int(5))]);
        let inv = lambda(&[("A1", frac(7, 3)), ("C2", frac(1, 5))]);
        assert_eq!(rescale(&rescale(&e, &l).unwrap(), &inv).unwrap(), e);
    }

    #[test]
    fn transport_examples() {
        let l = lambda(&[("A1", int(2)), ("C2", int(1))]);
        let x = alloc(&[("A1", &[(1, 1), (2, 3)]), ("C2", &[(0, 1), (1, 3)])]);
        assert_eq!(
            transport_allocation(&x, &l).unwrap(),
            alloc(&[("A1", &[(2, 1), (4, 3)]), ("C2", &[(0, 1), (1, 3)])])
        );
        let e = e0();
        assert_eq!(
            transport_allocation(&e.endowment_allocation(), &l).unwrap(),
            rescale(&e, &l).unwrap().endowment_allocation()
        );
    }

    #[test]
    fn bad_lambdas() {
        let e = e0();
        assert_eq!(
            rescale(&e, &lambda(&[("A1", int(0)), ("C2", int(1))])),
            Err(AnalysisError::NonPositiveLambda("A1".into()))
        );
        assert_eq!(
            rescale(&e, &lambda(&[("A1", int(1))])),
            Err(AnalysisError::MissingLambda("C2".into()))
        );
        assert!(matches!(
            rescale(
                &e,
                &lambda(&[("A1", int(1)), ("C2", int(1)), ("Z", int(1))])
            ),
            Err(AnalysisError::Model(ModelError::UnknownCohort(_)))
        ));
    }
}
