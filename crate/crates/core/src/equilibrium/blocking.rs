use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::AnalysisError;
use crate::economy::{utility, Allocation, Bundle, Economy, FeasibilityMode};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, OptimalSolution, Relation};
use crate::rational::{dot, Rational};

/// Largest cohort count scanned; the scan visits `2^n - 1` patterns.
const MAX_SCAN_COHORTS: usize = 16;

/// A cohort-symmetric coalition that strictly improves on an allocation
/// using only its own endowments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingWitness {
    /// Atoms taking part, each with its full mass.
    pub included_atoms: Vec<String>,
    /// Participating measure of each included atomless cohort, in `(0, mass]`.
    pub fractions: BTreeMap<String, Rational>,
    pub per_capita_bundles: BTreeMap<String, Bundle>,
    /// Smallest per-capita utility gain over the blocked allocation.
    pub margin: Rational,
}

impl BlockingWitness {
    /// Measure contributed by each member cohort.
    fn weights<'a>(&'a self, e: &'a Economy) -> impl Iterator<Item = (&'a str, Rational)> + 'a {
        e.cohorts().iter().filter_map(move |c| {
            if self.included_atoms.contains(&c.id) {
                Some((c.id.as_str(), c.mass.clone()))
            } else {
                self.fractions
                    .get(&c.id)
                    .map(|s| (c.id.as_str(), s.clone()))
            }
        })
    }

    /// Re-checks resource balance and strict improvement by substitution.
    pub fn verify(&self, e: &Economy, x: &Allocation) -> bool {
        if !self.margin.is_positive() {
            return false;
        }
        let l = e.commodities();
        let mut balance = vec![Rational::zero(); l];
        let mut members = 0;
        for (id, weight) in self.weights(e) {
            let Some(c) = e.cohort(id) else { return false };
            let Some(y) = self.per_capita_bundles.get(id) else {
                return false;
            };
            let Some(current) = x.get(id) else {
                return false;
            };
            if !weight.is_positive() || weight > c.mass || y.len() != l {
                return false;
            }
            for j in 0..l {
                balance[j] += &weight * (&y[j] - &c.endowment[j]);
            }
            let gain = dot(&c.utility, y) - dot(&c.utility, current);
            if gain < self.margin {
                return false;
            }
            members += 1;
        }
        members > 0
            && members == self.per_capita_bundles.len()
            && balance.iter().all(|b| b.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternResult {
    /// Included cohort ids, in economy order.
    pub members: Vec<String>,
    /// Optimal uniform gain `δ*`; the pattern blocks iff it is positive.
    pub delta: Rational,
    pub solution: OptimalSolution,
}

/// Cohort indices selected by a pattern bitmask.
fn members_of(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Blocking program for one inclusion pattern, given as a bitmask over
/// cohorts. Columns per member in economy order: atoms get a per-capita
/// bundle `y`, atomless cohorts an aggregate bundle `z` and a participating
/// measure `s ∈ [0, mass]`; a free `δ` comes last. Rows: resource balance
/// per good, then one utility row per member.
pub fn blocking_lp(
    e: &Economy,
    x: &Allocation,
    mask: usize,
) -> Result<LinearProgram, AnalysisError> {
    e.check_shape(x)?;
    let l = e.commodities();
    let members = members_of(mask, e.cohorts().len());
    if members.is_empty() {
        return Err(AnalysisError::UnsupportedShape(
            "empty coalition pattern".into(),
        ));
    }
    let mut offsets = Vec::with_capacity(members.len());
    let mut width = 0;
    for &i in &members {
        offsets.push(width);
        width += if e.cohorts()[i].atomic { l } else { l + 1 };
    }
    let delta = width;
    width += 1;

    let mut lp = LinearProgram::nonnegative(width);
    lp.objective[delta] = Rational::one();
    lp.set_bounds(delta, None, None);

    let mut resource_rows = vec![vec![Rational::zero(); width]; l];
    let mut resource_rhs = vec![Rational::zero(); l];
    let mut utility_rows = Vec::with_capacity(members.len());
    for (&i, &off) in members.iter().zip(&offsets) {
        let c = &e.cohorts()[i];
        let current = dot(&c.utility, &x.bundles[&c.id]);
        let mut urow = vec![Rational::zero(); width];
        urow[off..off + l].clone_from_slice(&c.utility);
        urow[delta] = -Rational::one();
        if c.atomic {
            for j in 0..l {
                resource_rows[j][off + j] = c.mass.clone();
                resource_rhs[j] += &c.mass * &c.endowment[j];
            }
            utility_rows.push((urow, current));
        } else {
            let s = off + l;
            lp.set_bounds(s, Some(Rational::zero()), Some(c.mass.clone()));
            for j in 0..l {
                resource_rows[j][off + j] = Rational::one();
                resource_rows[j][s] = -c.endowment[j].clone();
            }
            urow[s] = -current;
            utility_rows.push((urow, Rational::zero()));
        }
    }
    for (row, rhs) in resource_rows.into_iter().zip(resource_rhs) {
        lp.add_row(row, Relation::Eq, rhs);
    }
    for (row, rhs) in utility_rows {
        lp.add_row(row, Relation::Ge, rhs);
    }
    Ok(lp)
}

/// Solves the blocking program for every non-empty inclusion pattern, in
/// increasing bitmask order.
pub fn scan_blocking(e: &Economy, x: &Allocation) -> Result<Vec<PatternResult>, AnalysisError> {
    let n = e.cohorts().len();
    if n > MAX_SCAN_COHORTS {
        return Err(AnalysisError::UnsupportedShape(format!(
            "blocking scan supports at most {MAX_SCAN_COHORTS} cohorts"
        )));
    }
    e.check_shape(x)?;
    (1..1usize << n)
        .map(|mask| {
            let lp = blocking_lp(e, x, mask)?;
            let solution = match solve_lp(&lp)? {
                LpOutcome::Optimal(s) => s,
                other => {
                    return Err(AnalysisError::Internal(format!(
                        "blocking program is feasible and bounded, solver reported {:?}",
                        other.status()
                    )))
                }
            };
            Ok(PatternResult {
                members: members_of(mask, n)
                    .into_iter()
                    .map(|i| e.cohorts()[i].id.clone())
                    .collect(),
                delta: solution.value.clone(),
                solution,
            })
        })
        .collect()
}

/// Converts a positive-gain pattern solution into a witness, or `None` when
/// some included atomless cohort participates with measure zero.
fn witness_from(e: &Economy, x: &Allocation, result: &PatternResult) -> Option<BlockingWitness> {
    let l = e.commodities();
    let mut included_atoms = Vec::new();
    let mut fractions = BTreeMap::new();
    let mut per_capita_bundles = BTreeMap::new();
    let mut off = 0;
    let primal = &result.solution.primal;
    for id in &result.members {
        let c = e.cohort(id).expect("pattern members come from the economy");
        if c.atomic {
            included_atoms.push(id.clone());
            per_capita_bundles.insert(id.clone(), Bundle::new(primal[off..off + l].to_vec()).ok()?);
            off += l;
        } else {
            let s = &primal[off + l];
            if !s.is_positive() {
                return None;
            }
            let y = primal[off..off + l].iter().map(|z| z / s).collect();
            per_capita_bundles.insert(id.clone(), Bundle::new(y).ok()?);
            fractions.insert(id.clone(), s.clone());
            off += l + 1;
        }
    }
    let margin = per_capita_bundles
        .iter()
        .map(|(id, y)| {
            let c = e.cohort(id).expect("member");
            utility(c, y).expect("shape") - utility(c, &x.bundles[id]).expect("shape")
        })
        .min()
        .expect("non-empty coalition");
    Some(BlockingWitness {
        included_atoms,
        fractions,
        per_capita_bundles,
        margin,
    })
}

/// Searches cohort-symmetric coalitions (any subset of atoms, any fraction
/// of each atomless cohort) for one that blocks `x`. `None` means no such
/// coalition blocks.
pub fn find_blocking_coalition(
    e: &Economy,
    x: &Allocation,
) -> Result<Option<BlockingWitness>, AnalysisError> {
    if !e.is_feasible(x, FeasibilityMode::FreeDisposal)? {
        return Err(AnalysisError::NotFeasible);
    }
    let scan = scan_blocking(e, x)?;
    let mut blocked = false;
    for result in &scan {
        if !result.delta.is_positive() {
            continue;
        }
        blocked = true;
        if let Some(w) = witness_from(e, x, result) {
            if !w.verify(e, x) {
                return Err(AnalysisError::Internal(format!(
                    "blocking witness for {:?} fails verification",
                    result.members
                )));
            }
            return Ok(Some(w));
        }
    }
    if blocked {
        // A minimal blocking pattern never has a zero-measure participant.
        return Err(AnalysisError::Internal(
            "positive blocking gain found only with zero-measure participants".into(),
        ));
    }
    Ok(None)
}
