use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use super::AnalysisError;
use crate::economy::{Allocation, Bundle, Economy, FeasibilityMode};
use crate::lp::{feasibility, FarkasCertificate, Feasibility, LinearProgram, Relation};
use crate::preference::{max_bang_set, PriceSystem};
use crate::rational::Rational;

/// Largest commodity count accepted by [`find_equilibrium`].
pub const MAX_EQUILIBRIUM_GOODS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetitiveEquilibrium {
    pub price: PriceSystem,
    pub allocation: Allocation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    Infeasible,
    NonPositivePrice,
    BudgetNotBinding,
    OutsideBangSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub cohort: Option<String>,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetitiveCheck {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Tests `(p, x)` against the linear-utility form of the equilibrium
/// conditions: exact feasibility, strictly positive prices, and for every
/// cohort a binding budget with support inside the bang-per-buck set.
pub fn check_competitive(
    e: &Economy,
    p: &PriceSystem,
    x: &Allocation,
) -> Result<CompetitiveCheck, AnalysisError> {
    if p.len() != e.commodities() {
        return Err(crate::economy::ModelError::ShapeMismatch(format!(
            "{} prices for {} goods",
            p.len(),
            e.commodities()
        ))
        .into());
    }
    let mut violations = Vec::new();
    if !e.is_feasible(x, FeasibilityMode::Exact)? {
        violations.push(Violation {
            cohort: None,
            kind: ViolationKind::Infeasible,
            detail: "aggregate allocation differs from aggregate endowment".into(),
        });
    }
    if !p.is_strictly_positive() {
        violations.push(Violation {
            cohort: None,
            kind: ViolationKind::NonPositivePrice,
            detail: "some good has price zero".into(),
        });
        return Ok(CompetitiveCheck {
            ok: false,
            violations,
        });
    }
    for c in e.cohorts() {
        let bundle = &x.bundles[&c.id];
        let spent = p.value(bundle);
        let wealth = p.value(&c.endowment);
        if spent != wealth {
            violations.push(Violation {
                cohort: Some(c.id.clone()),
                kind: ViolationKind::BudgetNotBinding,
                detail: format!("spends {spent}, budget {wealth}"),
            });
        }
        let bang = max_bang_set(p, &c.utility)?;
        let outside: Vec<usize> = bundle
            .support()
            .into_iter()
            .filter(|&j| !bang.contains(j))
            .collect();
        if !outside.is_empty() {
            violations.push(Violation {
                cohort: Some(c.id.clone()),
                kind: ViolationKind::OutsideBangSet,
                detail: format!("consumes goods {outside:?} outside bang set {:?}", bang.0),
            });
        }
    }
    Ok(CompetitiveCheck {
        ok: violations.is_empty(),
        violations,
    })
}

/// `a_j p_k - a_k p_j ≥ 0` for every `k ≠ j`: good `j` is a bang-per-buck
/// good for weights `a`. Prices occupy the first `a.len()` columns of a
/// row of length `width`.
fn push_bang_rows(lp: &mut LinearProgram, a: &[Rational], good: usize, width: usize) {
    for k in 0..a.len() {
        if k == good {
            continue;
        }
        let mut row = vec![Rational::zero(); width];
        row[k] = a[good].clone();
        row[good] = -a[k].clone();
        lp.add_row(row, Relation::Ge, Rational::zero());
    }
}

/// Feasibility system in prices `p ≥ 1` under which `x` is competitive:
/// one budget row per cohort, then bang rows for each supported good.
pub fn decentralization_lp(e: &Economy, x: &Allocation) -> Result<LinearProgram, AnalysisError> {
    e.check_shape(x)?;
    let l = e.commodities();
    let mut lp = LinearProgram::nonnegative(l);
    for j in 0..l {
        lp.lower[j] = Some(Rational::one());
    }
    for c in e.cohorts() {
        let bundle = &x.bundles[&c.id];
        let row = bundle
            .iter()
            .zip(c.endowment.iter())
            .map(|(xi, wi)| xi - wi)
            .collect();
        lp.add_row(row, Relation::Eq, Rational::zero());
    }
    for c in e.cohorts() {
        for j in x.bundles[&c.id].support() {
            push_bang_rows(&mut lp, &c.utility, j, l);
        }
    }
    Ok(lp)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decentralization {
    Price(PriceSystem),
    /// No strictly positive price supports the allocation.
    Infeasible(FarkasCertificate),
}

/// Searches all strictly positive prices at once for one that makes `x`
/// competitive.
pub fn decentralizing_prices(
    e: &Economy,
    x: &Allocation,
) -> Result<Decentralization, AnalysisError> {
    if !e.is_feasible(x, FeasibilityMode::Exact)? {
        return Err(AnalysisError::NotFeasible);
    }
    let lp = decentralization_lp(e, x)?;
    match feasibility(&lp)? {
        Feasibility::Feasible(p) => {
            let price = PriceSystem::new(p)?;
            let check = check_competitive(e, &price, x)?;
            if !check.ok {
                return Err(AnalysisError::Internal(format!(
                    "decentralizing price fails the competitive check: {:?}",
                    check.violations
                )));
            }
            Ok(Decentralization::Price(price))
        }
        Feasibility::Infeasible(cert) => Ok(Decentralization::Infeasible(cert)),
    }
}

/// Each good is bought by cohort 0 only, cohort 1 only, or both. Goods no
/// one may buy cannot clear since every aggregate endowment is positive.
fn support_patterns(l: usize) -> impl Iterator<Item = (BTreeSet<usize>, BTreeSet<usize>)> {
    let total = 3usize.pow(l as u32);
    (0..total).filter_map(move |mut code| {
        let mut first = BTreeSet::new();
        let mut second = BTreeSet::new();
        for j in 0..l {
            match code % 3 {
                0 => {
                    first.insert(j);
                }
                1 => {
                    second.insert(j);
                }
                _ => {
                    first.insert(j);
                    second.insert(j);
                }
            }
            code /= 3;
        }
        (!first.is_empty() && !second.is_empty()).then_some((first, second))
    })
}

/// Enumerates competitive equilibria of a two-cohort economy by support
/// pattern. For a pattern `(D_0, D_1)` the unknowns are prices `p ≥ 1` and
/// spending `e_ij ≥ 0` on `j ∈ D_i`; bang-set, budget and market-clearing
/// conditions are all linear in these. One vertex per feasible pattern is
/// kept, then deduplicated.
pub fn find_equilibrium(e: &Economy) -> Result<Vec<CompetitiveEquilibrium>, AnalysisError> {
    let l = e.commodities();
    if e.cohorts().len() != 2 {
        return Err(AnalysisError::UnsupportedShape(format!(
            "equilibrium search needs exactly 2 cohorts, got {}",
            e.cohorts().len()
        )));
    }
    if l > MAX_EQUILIBRIUM_GOODS {
        return Err(AnalysisError::UnsupportedShape(format!(
            "equilibrium search supports at most {MAX_EQUILIBRIUM_GOODS} goods, got {l}"
        )));
    }
    let cohorts = e.cohorts();
    let total = e.aggregate_endowment();
    let mut found: Vec<CompetitiveEquilibrium> = Vec::new();
    for (first, second) in support_patterns(l) {
        let supports = [&first, &second];
        // Column layout: prices, then spending of cohort 0, then cohort 1.
        let mut spend_col = Vec::new();
        let mut next = l;
        for (i, d) in supports.iter().enumerate() {
            for &j in d.iter() {
                spend_col.push((i, j, next));
                next += 1;
            }
        }
        let width = next;
        let mut lp = LinearProgram::nonnegative(width);
        for j in 0..l {
            lp.lower[j] = Some(Rational::one());
        }
        for (i, d) in supports.iter().enumerate() {
            for &j in d.iter() {
                push_bang_rows(&mut lp, &cohorts[i].utility, j, width);
            }
        }
        for (i, c) in cohorts.iter().enumerate() {
            let mut row = vec![Rational::zero(); width];
            for &(ci, _, col) in &spend_col {
                if ci == i {
                    row[col] = Rational::one();
                }
            }
            for (j, w) in c.endowment.iter().enumerate() {
                row[j] -= w;
            }
            lp.add_row(row, Relation::Eq, Rational::zero());
        }
        for j in 0..l {
            let mut row = vec![Rational::zero(); width];
            row[j] = -total[j].clone();
            for &(ci, cj, col) in &spend_col {
                if cj == j {
                    row[col] = cohorts[ci].mass.clone();
                }
            }
            lp.add_row(row, Relation::Eq, Rational::zero());
        }
        let Feasibility::Feasible(point) = feasibility(&lp)? else {
            continue;
        };
        let mut bundles = vec![vec![Rational::zero(); l]; 2];
        for &(i, j, col) in &spend_col {
            bundles[i][j] = &point[col] / &point[j];
        }
        let allocation = Allocation::from_pairs(cohorts.iter().zip(bundles).map(|(c, b)| {
            (
                c.id.clone(),
                Bundle::new(b).expect("spending is non-negative"),
            )
        }));
        let price = PriceSystem::new(point[..l].to_vec())?;
        if !check_competitive(e, &price, &allocation)?.ok {
            return Err(AnalysisError::Internal(format!(
                "support pattern {first:?}/{second:?} produced a non-equilibrium"
            )));
        }
        let candidate = CompetitiveEquilibrium { price, allocation };
        if !found.contains(&candidate) {
            found.push(candidate);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{alloc, e0, e1};
    use crate::rational::{frac, vec_frac};

    fn price(pairs: &[(i64, i64)]) -> PriceSystem {
        PriceSystem::new(vec_frac(pairs)).unwrap()
    }

    fn competitive_allocation() -> Allocation {
        alloc(&[("A1", &[(1, 1), (0, 1)]), ("C2", &[(0, 1), (1, 1)])])
    }

    fn core_max_allocation() -> Allocation {
        alloc(&[("A1", &[(1, 1), (2, 3)]), ("C2", &[(0, 1), (1, 3)])])
    }

    #[test]
    fn check_competitive_examples() {
        let e = e0();
        let half = price(&[(1, 2), (1, 2)]);
        assert!(
            check_competitive(&e, &half, &competitive_allocation())
                .unwrap()
                .ok
        );

        let at_endowment = check_competitive(&e, &half, &e.endowment_allocation()).unwrap();
        assert!(!at_endowment.ok);
        assert!(at_endowment
            .violations
            .iter()
            .any(|v| v.cohort.as_deref() == Some("A1") && v.kind == ViolationKind::OutsideBangSet));

        let core =
            check_competitive(&e, &price(&[(1, 4), (3, 4)]), &core_max_allocation()).unwrap();
        assert!(!core.ok);
        assert!(core
            .violations
            .iter()
            .any(|v| v.cohort.as_deref() == Some("A1") && v.kind == ViolationKind::OutsideBangSet));
    }

    #[test]
    fn zero_price_is_a_violation() {
        let e = e0();
        let check =
            check_competitive(&e, &price(&[(0, 1), (1, 1)]), &competitive_allocation()).unwrap();
        assert!(!check.ok);
        assert_eq!(check.violations[0].kind, ViolationKind::NonPositivePrice);
    }

    #[test]
    fn e0_has_exactly_one_equilibrium() {
        let eqs = find_equilibrium(&e0()).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].price, price(&[(1, 2), (1, 2)]));
        assert_eq!(eqs[0].allocation, competitive_allocation());
    }

    #[test]
    fn e1_no_trade_equilibrium() {
        let e = e1();
        let eqs = find_equilibrium(&e).unwrap();
        let no_trade: Vec<_> = eqs
            .iter()
            .filter(|q| q.allocation == e.endowment_allocation())
            .collect();
        assert!(!no_trade.is_empty());
        for q in no_trade {
            let ratio = &q.price[0] / &q.price[1];
            assert!(ratio >= frac(1, 3) && ratio <= frac(3, 1));
        }
    }

    #[test]
    fn identical_weights_support_no_trade_at_own_price() {
        let mut doc = e0().to_document();
        doc.cohorts[1].utility = doc.cohorts[0].utility.clone();
        let e = crate::economy::validate_economy(&doc).unwrap();
        let a = PriceSystem::new(e.cohorts()[0].utility.to_vec()).unwrap();
        assert!(
            check_competitive(&e, &a, &e.endowment_allocation())
                .unwrap()
                .ok
        );
        let eqs = find_equilibrium(&e).unwrap();
        assert!(eqs
            .iter()
            .any(|q| q.price == a && q.allocation == e.endowment_allocation()));
    }

    #[test]
    fn equilibrium_search_rejects_other_shapes() {
        let e = crate::fixtures::single_cohort();
        assert!(matches!(
            find_equilibrium(&e),
            Err(AnalysisError::UnsupportedShape(_))
        ));
    }

    #[test]
    fn decentralizing_prices_examples() {
        let e = e0();
        assert_eq!(
            decentralizing_prices(&e, &competitive_allocation()).unwrap(),
            Decentralization::Price(price(&[(1, 2), (1, 2)]))
        );
        assert!(matches!(
            decentralizing_prices(&e, &core_max_allocation()).unwrap(),
            Decentralization::Infeasible(_)
        ));
        assert!(matches!(
            decentralizing_prices(&e, &e.endowment_allocation()).unwrap(),
            Decentralization::Infeasible(_)
        ));
        let infeasible = alloc(&[("A1", &[(3, 1), (0, 1)]), ("C2", &[(0, 1), (1, 1)])]);
        assert_eq!(
            decentralizing_prices(&e, &infeasible),
            Err(AnalysisError::NotFeasible)
        );
    }

    #[test]
    fn pattern_count() {
        assert_eq!(support_patterns(2).count(), 7);
        assert_eq!(support_patterns(3).count(), 25);
    }
}
