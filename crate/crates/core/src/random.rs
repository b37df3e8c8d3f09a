//! Seeded generators for random economies, prices, allocations and LPs.
//!
//! All values come from small rational grids so exact pivots stay cheap.
//! Generators that must satisfy hypotheses use rejection sampling.

use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::economy::{Allocation, Bundle, Cohort, Economy, UtilityWeights};
use crate::equilibrium::{pareto_check, welfare_maximizing_allocation, Lambda};
use crate::lp::{LinearProgram, Relation};
use crate::preference::PriceSystem;
use crate::rational::{frac, int, Rational};

/// Denominator of the weight grid before normalization.
const WEIGHT_GRID: i64 = 12;
/// Endowments are multiples of 1/ENDOWMENT_DENOM up to ENDOWMENT_MAX.
const ENDOWMENT_DENOM: i64 = 2;
const ENDOWMENT_MAX: i64 = 4;
const MAX_REJECTIONS: usize = 10_000;

pub type CampaignRng = ChaCha8Rng;

/// Deterministic generator for one (family, trial) cell of a campaign.
pub fn trial_rng(seed: u64, family: u64, trial: u64) -> CampaignRng {
    // splitmix64 over the packed indices
    let mut z = seed
        ^ family.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ trial.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

pub fn goods<R: Rng>(rng: &mut R) -> usize {
    rng.gen_range(2..=5)
}

pub fn weights<R: Rng>(rng: &mut R, l: usize) -> UtilityWeights {
    let raw = (0..l)
        .map(|_| int(rng.gen_range(1..=WEIGHT_GRID)))
        .collect();
    UtilityWeights::normalized(raw).expect("positive grid weights")
}

/// Two distinct normalized weight vectors.
pub fn distinct_weights<R: Rng>(rng: &mut R, l: usize) -> (UtilityWeights, UtilityWeights) {
    let first = weights(rng, l);
    loop {
        let second = weights(rng, l);
        if second != first {
            return (first, second);
        }
    }
}

pub fn endowment<R: Rng>(rng: &mut R, l: usize) -> Bundle {
    Bundle::new(
        (0..l)
            .map(|_| frac(rng.gen_range(0..=ENDOWMENT_MAX), ENDOWMENT_DENOM))
            .collect(),
    )
    .expect("non-negative grid")
}

pub fn mass<R: Rng>(rng: &mut R) -> Rational {
    frac(rng.gen_range(1..=6), 2)
}

/// Strictly positive price, left unnormalized by the caller's choice of
/// scale before [`PriceSystem::new`] normalizes it.
pub fn raw_price<R: Rng>(rng: &mut R, l: usize) -> Vec<Rational> {
    (0..l)
        .map(|_| frac(rng.gen_range(1..=20), rng.gen_range(1..=4)))
        .collect()
}

pub fn price<R: Rng>(rng: &mut R, l: usize) -> PriceSystem {
    PriceSystem::new(raw_price(rng, l)).expect("positive")
}

pub fn cohort<R: Rng>(rng: &mut R, id: &str, atomic: bool, l: usize) -> Cohort {
    Cohort {
        id: id.to_string(),
        atomic,
        mass: mass(rng),
        endowment: endowment(rng, l),
        utility: weights(rng, l),
    }
}

fn cohort_id(i: usize) -> String {
    format!("c{i}")
}

/// Random valid economy with the given atom flags.
pub fn economy_with<R: Rng>(rng: &mut R, l: usize, atomic: &[bool]) -> Economy {
    for _ in 0..MAX_REJECTIONS {
        let cohorts = atomic
            .iter()
            .enumerate()
            .map(|(i, &a)| cohort(rng, &cohort_id(i), a, l))
            .collect();
        if let Ok(e) = Economy::new(l, cohorts) {
            return e;
        }
    }
    panic!("could not sample a valid economy");
}

/// Random valid economy with 1 to `max_cohorts` cohorts and random atom flags.
pub fn economy<R: Rng>(rng: &mut R, max_cohorts: usize) -> Economy {
    let l = goods(rng);
    let n = rng.gen_range(1..=max_cohorts);
    let flags: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    economy_with(rng, l, &flags)
}

fn is_nontrivial(e: &Economy) -> bool {
    pareto_check(e).map(|p| !p.optimal).unwrap_or(false)
}

/// Two cohorts, exactly one of them atomic (at a random position), of
/// distinct types, with `ω` not Pareto optimal.
pub fn unbalanced_nontrivial<R: Rng>(rng: &mut R) -> Economy {
    for _ in 0..MAX_REJECTIONS {
        let l = goods(rng);
        let atom_first = rng.gen_bool(0.5);
        let e = economy_with(rng, l, &[atom_first, !atom_first]);
        if !e.cohorts()[0].same_type(&e.cohorts()[1]) && is_nontrivial(&e) {
            return e;
        }
    }
    panic!("could not sample a non-trivial unbalanced economy");
}

/// Two atoms with `ω` not Pareto optimal.
pub fn two_atom_nontrivial<R: Rng>(rng: &mut R) -> Economy {
    for _ in 0..MAX_REJECTIONS {
        let l = goods(rng);
        let e = economy_with(rng, l, &[true, true]);
        if is_nontrivial(&e) {
            return e;
        }
    }
    panic!("could not sample a non-trivial two-atom economy");
}

/// Random economy whose endowment is replaced by a welfare-maximizing
/// allocation for random positive welfare weights, so `ω` is Pareto optimal.
pub fn pareto_optimal_economy<R: Rng>(rng: &mut R, max_cohorts: usize) -> Economy {
    let base = economy(rng, max_cohorts);
    let theta: Vec<Rational> = (0..base.cohorts().len())
        .map(|_| int(rng.gen_range(1..=5)))
        .collect();
    let x = welfare_maximizing_allocation(&base, &theta).expect("welfare program solves");
    let cohorts = base
        .cohorts()
        .iter()
        .map(|c| Cohort {
            endowment: x.bundles[&c.id].clone(),
            ..c.clone()
        })
        .collect();
    Economy::new(base.commodities(), cohorts).expect("aggregate endowment unchanged")
}

pub fn lambda<R: Rng>(rng: &mut R, e: &Economy) -> Lambda {
    e.cohorts()
        .iter()
        .map(|c| {
            (
                c.id.clone(),
                frac(rng.gen_range(1..=9), rng.gen_range(1..=4)),
            )
        })
        .collect()
}

/// Exactly feasible allocation: each good's aggregate is split among
/// cohorts by random grid shares.
pub fn feasible_allocation<R: Rng>(rng: &mut R, e: &Economy) -> Allocation {
    let n = e.cohorts().len();
    let l = e.commodities();
    let total = e.aggregate_endowment();
    let mut bundles = vec![vec![Rational::zero(); l]; n];
    for j in 0..l {
        let shares: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=4)).collect();
        let sum: i64 = shares.iter().sum();
        for (i, c) in e.cohorts().iter().enumerate() {
            let share = if sum == 0 {
                frac(1, n as i64)
            } else {
                frac(shares[i], sum)
            };
            bundles[i][j] = share * &total[j] / &c.mass;
        }
    }
    Allocation::from_pairs(
        e.cohorts()
            .iter()
            .zip(bundles)
            .map(|(c, b)| (c.id.clone(), Bundle::new(b).expect("non-negative"))),
    )
}

/// Random LP with `1..=max_vars` columns and `0..=max_rows` rows, small
/// integer data and a mix of bound types.
pub fn linear_program<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_rows);
    let mut lp = LinearProgram::nonnegative(n);
    for j in 0..n {
        lp.objective[j] = int(rng.gen_range(-5..=5));
        let (lower, upper) = match rng.gen_range(0..20) {
            0 => (None, None),
            1 => (None, Some(int(rng.gen_range(-3..=6)))),
            2..=5 => {
                let l = rng.gen_range(-4..=2);
                (Some(int(l)), Some(int(l + rng.gen_range(0..=6))))
            }
            6 | 7 => (Some(int(rng.gen_range(-4..=2))), None),
            _ => (Some(int(0)), None),
        };
        lp.set_bounds(j, lower, upper);
    }
    for _ in 0..m {
        // `<=` rows lean positive so that many programs are bounded,
        // `>=` rows lean the other way so that many are feasible.
        let (relation, coefficients, rhs) = match rng.gen_range(0..10) {
            0 | 1 => (Relation::Eq, -5..=5, -6..=6),
            2 | 3 => (Relation::Ge, -5..=3, -12..=2),
            _ => (Relation::Le, -2..=5, 0..=12),
        };
        let row = (0..n)
            .map(|_| {
                if rng.gen_bool(0.25) {
                    int(0)
                } else {
                    int(rng.gen_range(coefficients.clone()))
                }
            })
            .collect();
        lp.add_row(
            row,
            relation,
            frac(rng.gen_range(rhs), rng.gen_range(1..=2)),
        );
    }
    lp
}

/// Whether every component of `x` is strictly positive.
pub fn strictly_positive(x: &[Rational]) -> bool {
    x.iter().all(|v| v.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::pareto_check;

    #[test]
    fn trial_rngs_are_reproducible() {
        let a: Vec<u32> = (0..4).map(|_| trial_rng(7, 1, 3).gen()).collect();
        let b: Vec<u32> = (0..4).map(|_| trial_rng(7, 1, 3).gen()).collect();
        assert_eq!(a, b);
        let c: u64 = trial_rng(7, 1, 4).gen();
        let d: u64 = trial_rng(7, 1, 3).gen();
        assert_ne!(c, d);
    }

    #[test]
    fn generated_economies_meet_their_hypotheses() {
        let mut rng = trial_rng(1, 0, 0);
        for _ in 0..10 {
            let e = unbalanced_nontrivial(&mut rng);
            assert_eq!(e.cohorts().iter().filter(|c| c.atomic).count(), 1);
            assert!(!pareto_check(&e).unwrap().optimal);

            let e = pareto_optimal_economy(&mut rng, 3);
            assert!(pareto_check(&e).unwrap().optimal);

            let e = economy(&mut rng, 3);
            let x = feasible_allocation(&mut rng, &e);
            assert!(e
                .is_feasible(&x, crate::economy::FeasibilityMode::Exact)
                .unwrap());
        }
    }
}
