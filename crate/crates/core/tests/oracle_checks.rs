//! Cross-checks against slow reference computations in `linex-oracle`.

use linex_core::economy::{utility, FeasibilityMode};
use linex_core::equilibrium::{core_max_allocation, find_blocking_coalition};
use linex_core::fixtures::e0;
use linex_core::lp::{solve_lp, LpOutcome};
use linex_core::preference::indirect_utility;
use linex_core::random::{self, trial_rng};
use linex_core::rational::{dot, frac};
use linex_oracle::{budget_corner_max, core_max_on_grid, vertex_optimum, VertexResult};

#[test]
fn simplex_agrees_with_vertex_enumeration() {
    let mut compared = 0;
    for trial in 0..400 {
        let mut rng = trial_rng(2024, 0, trial);
        let lp = random::linear_program(&mut rng, 5, 5);
        let outcome = solve_lp(&lp).expect("certificates verify");
        let VertexResult::Enumerated { best, .. } = vertex_optimum(&lp, 1_000_000) else {
            panic!("trial {trial}: too many bases")
        };
        match outcome {
            LpOutcome::Optimal(s) => assert_eq!(Some(s.value), best, "trial {trial}"),
            LpOutcome::Infeasible(_) => assert_eq!(best, None, "trial {trial}"),
            // The lifted region has a vertex whenever it is non-empty; vertex
            // values cannot bound an unbounded objective.
            LpOutcome::Unbounded(_) => assert!(best.is_some(), "trial {trial}"),
        }
        compared += 1;
    }
    assert_eq!(compared, 400);
}

#[test]
fn core_max_of_e0_matches_grid_search() {
    let e = e0();
    let exact = core_max_allocation(&e).unwrap();
    assert_eq!(exact.value, frac(11, 12));
    for d in [6, 12, 24] {
        assert_eq!(
            core_max_on_grid(&e, d),
            Some(frac(11, 12)),
            "denominator {d}"
        );
    }
}

#[test]
fn grid_search_never_beats_core_max() {
    for trial in 0..40 {
        let mut rng = trial_rng(7, 1, trial);
        let mut e = random::unbalanced_nontrivial(&mut rng);
        while e.commodities() > 3 {
            e = random::unbalanced_nontrivial(&mut rng);
        }
        let exact = core_max_allocation(&e).unwrap().value;
        let grid = core_max_on_grid(&e, 6).expect("endowment point lies on the grid");
        assert!(grid <= exact, "trial {trial}: grid {grid} beats {exact}");
    }
}

#[test]
fn indirect_utility_matches_budget_corners() {
    for trial in 0..300 {
        let mut rng = trial_rng(3, 2, trial);
        let l = random::goods(&mut rng);
        let c = random::cohort(&mut rng, "c", false, l);
        let p = random::price(&mut rng, l);
        let budget = dot(&p, &c.endowment);
        assert_eq!(
            indirect_utility(&c, &p).unwrap(),
            budget_corner_max(&c.utility, &p, &budget),
            "trial {trial}"
        );
    }
}

#[test]
fn allocations_below_autarky_are_blocked() {
    let mut checked = 0;
    for trial in 0..200 {
        let mut rng = trial_rng(5, 3, trial);
        let e = random::economy(&mut rng, 3);
        let x = random::feasible_allocation(&mut rng, &e);
        assert!(e.is_feasible(&x, FeasibilityMode::Exact).unwrap());
        let below = e.cohorts().iter().any(|c| {
            utility(c, &c.endowment).unwrap() > utility(c, x.get(&c.id).unwrap()).unwrap()
        });
        if below {
            checked += 1;
            let w = find_blocking_coalition(&e, &x).unwrap();
            assert!(w.is_some_and(|w| w.verify(&e, &x)), "trial {trial}");
        }
    }
    assert!(checked > 50);
}
