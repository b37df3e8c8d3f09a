//! Small named economies used in examples, tests and the demo presets.

use crate::economy::{Allocation, Bundle, Cohort, Economy, UtilityWeights};
use crate::rational::{int, vec_frac};

fn cohort(id: &str, atomic: bool, endowment: &[(i64, i64)], weights: &[(i64, i64)]) -> Cohort {
    Cohort {
        id: id.into(),
        atomic,
        mass: int(1),
        endowment: Bundle::new(vec_frac(endowment)).expect("non-negative"),
        utility: UtilityWeights::new(vec_frac(weights)).expect("normalized"),
    }
}

/// Atom `A1` holds good 1 and prefers good 0; continuum `C2` holds good 0
/// and prefers good 1. Both have mass 1. Not Pareto optimal at `ω`.
pub fn e0() -> Economy {
    Economy::new(
        2,
        vec![
            cohort("A1", true, &[(0, 1), (1, 1)], &[(3, 4), (1, 4)]),
            cohort("C2", false, &[(1, 1), (0, 1)], &[(1, 4), (3, 4)]),
        ],
    )
    .expect("valid")
}

/// `E0` with endowments swapped, so each cohort already holds its favourite
/// good and `ω` is Pareto optimal.
pub fn e1() -> Economy {
    Economy::new(
        2,
        vec![
            cohort("A1", true, &[(1, 1), (0, 1)], &[(3, 4), (1, 4)]),
            cohort("C2", false, &[(0, 1), (1, 1)], &[(1, 4), (3, 4)]),
        ],
    )
    .expect("valid")
}

/// Atom `A1` holds good 0 and leans to good 1; continuum `C2` holds good 1
/// and is indifferent between goods. `ω` is not Pareto optimal, yet the
/// core-max allocation `A1:(0,1), C2:(1,0)` is competitive at price
/// `(1/2, 1/2)` and every allocation giving `C2` more is blocked.
pub fn competitive_core() -> Economy {
    Economy::new(
        2,
        vec![
            cohort("A1", true, &[(1, 1), (0, 1)], &[(2, 5), (3, 5)]),
            cohort("C2", false, &[(0, 1), (1, 1)], &[(1, 2), (1, 2)]),
        ],
    )
    .expect("valid")
}

/// One continuum of mass 1 holding `(1, 2)` with weights `(1/3, 2/3)`.
pub fn single_cohort() -> Economy {
    Economy::new(
        2,
        vec![cohort("S", false, &[(1, 1), (2, 1)], &[(1, 3), (2, 3)])],
    )
    .expect("valid")
}

/// Builds an allocation from `(id, [(num, den)...])` pairs.
pub fn alloc(bundles: &[(&str, &[(i64, i64)])]) -> Allocation {
    Allocation::from_pairs(bundles.iter().map(|(id, q)| {
        (
            id.to_string(),
            Bundle::new(vec_frac(q)).expect("non-negative"),
        )
    }))
}
