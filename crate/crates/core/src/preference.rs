//! Demand theory for linear utilities: bang-per-buck sets, the demand
//! selection and indirect utility.

use std::collections::BTreeSet;
use std::ops::Deref;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{Bundle, Cohort};
use crate::rational::{dot, serde_rational_vec, sum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PreferenceError {
    #[error("price of good {good} is zero; marginal utility per unit of money is unbounded")]
    ZeroPrice { good: usize },
    #[error("price vector must be non-negative and not identically zero")]
    InvalidPrice,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Non-negative, non-zero prices, normalized on construction to sum to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PriceSystem(#[serde(with = "serde_rational_vec")] Vec<Rational>);

impl PriceSystem {
    pub fn new(prices: Vec<Rational>) -> Result<Self, PreferenceError> {
        if prices.iter().any(|p| p.is_negative()) {
            return Err(PreferenceError::InvalidPrice);
        }
        let total = sum(&prices);
        if total.is_zero() {
            return Err(PreferenceError::InvalidPrice);
        }
        Ok(PriceSystem(
            prices.into_iter().map(|p| p / &total).collect(),
        ))
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.0.iter().all(|p| p.is_positive())
    }

    /// Value `p · x` of a bundle.
    pub fn value(&self, x: &[Rational]) -> Rational {
        dot(&self.0, x)
    }

    fn require_positive(&self) -> Result<(), PreferenceError> {
        match self.0.iter().position(|p| p.is_zero()) {
            Some(good) => Err(PreferenceError::ZeroPrice { good }),
            None => Ok(()),
        }
    }
}

impl Deref for PriceSystem {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

/// Goods with maximal marginal utility per unit of money.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BangSet(pub BTreeSet<usize>);

impl BangSet {
    pub fn contains(&self, good: usize) -> bool {
        self.0.contains(&good)
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn is_disjoint(&self, other: &BangSet) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

/// `{j : a_j p_k ≥ a_k p_j for all k}`, by cross-multiplication.
pub fn max_bang_set(p: &PriceSystem, a: &[Rational]) -> Result<BangSet, PreferenceError> {
    if p.len() != a.len() {
        return Err(PreferenceError::ShapeMismatch(format!(
            "{} prices, {} weights",
            p.len(),
            a.len()
        )));
    }
    p.require_positive()?;
    let goods = (0..a.len())
        .filter(|&j| (0..a.len()).all(|k| &a[j] * &p[k] >= &a[k] * &p[j]))
        .collect();
    Ok(BangSet(goods))
}

fn budget(c: &Cohort, p: &PriceSystem) -> Result<Rational, PreferenceError> {
    if c.endowment.len() != p.len() {
        return Err(PreferenceError::ShapeMismatch(format!(
            "cohort {:?} holds {} goods, {} prices",
            c.id,
            c.endowment.len(),
            p.len()
        )));
    }
    Ok(p.value(&c.endowment))
}

/// The whole budget `p·ω_c` spent on the lowest-indexed bang-per-buck good.
pub fn demand(c: &Cohort, p: &PriceSystem) -> Result<Bundle, PreferenceError> {
    let wealth = budget(c, p)?;
    let bang = max_bang_set(p, &c.utility)?;
    let good = bang
        .first()
        .expect("bang set of a positive price is non-empty");
    let amount = wealth / &p[good];
    Ok(Bundle::unit(p.len(), good, amount))
}

/// `(p·ω_c) · max_j a_j / p_j`, the maximal utility on the budget set.
pub fn indirect_utility(c: &Cohort, p: &PriceSystem) -> Result<Rational, PreferenceError> {
    let wealth = budget(c, p)?;
    p.require_positive()?;
    let best = c
        .utility
        .iter()
        .zip(p.iter())
        .map(|(a, q)| a / q)
        .max()
        .expect("at least one good");
    Ok(wealth * best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::UtilityWeights;
    use crate::rational::{frac, vec_frac};

    fn prices(pairs: &[(i64, i64)]) -> PriceSystem {
        PriceSystem::new(vec_frac(pairs)).unwrap()
    }

    fn cohort(endowment: &[(i64, i64)], weights: &[(i64, i64)]) -> Cohort {
        Cohort {
            id: "c".into(),
            atomic: true,
            mass: frac(1, 1),
            endowment: Bundle::new(vec_frac(endowment)).unwrap(),
            utility: UtilityWeights::new(vec_frac(weights)).unwrap(),
        }
    }

    fn set(goods: &[usize]) -> BangSet {
        BangSet(goods.iter().copied().collect())
    }

    #[test]
    fn price_system_normalizes() {
        let p = prices(&[(2, 1), (6, 1)]);
        assert_eq!(p.as_slice(), vec_frac(&[(1, 4), (3, 4)]).as_slice());
        assert_eq!(
            PriceSystem::new(vec_frac(&[(0, 1), (0, 1)])),
            Err(PreferenceError::InvalidPrice)
        );
        assert_eq!(
            PriceSystem::new(vec_frac(&[(-1, 1), (2, 1)])),
            Err(PreferenceError::InvalidPrice)
        );
    }

    #[test]
    fn bang_set_examples() {
        let a1 = vec_frac(&[(3, 4), (1, 4)]);
        let a2 = vec_frac(&[(1, 4), (3, 4)]);
        assert_eq!(
            max_bang_set(&prices(&[(1, 4), (3, 4)]), &a1).unwrap(),
            set(&[0])
        );
        assert_eq!(
            max_bang_set(&prices(&[(3, 4), (1, 4)]), &a1).unwrap(),
            set(&[0, 1])
        );
        assert_eq!(
            max_bang_set(&prices(&[(1, 2), (1, 2)]), &a2).unwrap(),
            set(&[1])
        );
        let a3 = vec_frac(&[(1, 5), (3, 10), (1, 2)]);
        assert_eq!(
            max_bang_set(&PriceSystem::new(a3.clone()).unwrap(), &a3).unwrap(),
            set(&[0, 1, 2])
        );
    }

    #[test]
    fn zero_price_rejected() {
        let p = prices(&[(0, 1), (1, 1)]);
        let a = vec_frac(&[(1, 2), (1, 2)]);
        assert_eq!(
            max_bang_set(&p, &a),
            Err(PreferenceError::ZeroPrice { good: 0 })
        );
        assert!(demand(&cohort(&[(1, 1), (1, 1)], &[(1, 2), (1, 2)]), &p).is_err());
        assert!(indirect_utility(&cohort(&[(1, 1), (1, 1)], &[(1, 2), (1, 2)]), &p).is_err());
    }

    #[test]
    fn demand_examples() {
        // Expected bundles come from the LP oracle in tests/preference_oracle.rs.
        let a1 = cohort(&[(0, 1), (1, 1)], &[(3, 4), (1, 4)]);
        let c2 = cohort(&[(1, 1), (0, 1)], &[(1, 4), (3, 4)]);
        assert_eq!(
            demand(&a1, &prices(&[(1, 4), (3, 4)])).unwrap().as_slice(),
            vec_frac(&[(3, 1), (0, 1)]).as_slice()
        );
        assert_eq!(
            demand(&a1, &prices(&[(3, 4), (1, 4)])).unwrap().as_slice(),
            vec_frac(&[(1, 3), (0, 1)]).as_slice()
        );
        assert_eq!(
            demand(&c2, &prices(&[(1, 2), (1, 2)])).unwrap().as_slice(),
            vec_frac(&[(0, 1), (1, 1)]).as_slice()
        );
    }

    #[test]
    fn indirect_utility_examples() {
        let a1 = cohort(&[(0, 1), (1, 1)], &[(3, 4), (1, 4)]);
        let c2 = cohort(&[(1, 1), (0, 1)], &[(1, 4), (3, 4)]);
        assert_eq!(
            indirect_utility(&a1, &prices(&[(1, 4), (3, 4)])).unwrap(),
            frac(9, 4)
        );
        assert_eq!(
            indirect_utility(&c2, &prices(&[(1, 4), (3, 4)])).unwrap(),
            frac(1, 4)
        );
        assert_eq!(
            indirect_utility(&a1, &prices(&[(1, 2), (1, 2)])).unwrap(),
            frac(3, 4)
        );
    }
}
