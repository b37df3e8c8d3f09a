use num_traits::Zero;

use super::pareto::pareto_check;
use super::AnalysisError;
use crate::economy::{Allocation, Bundle, Economy};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::rational::{dot, Rational};

/// The core allocation most preferred by the atom, holding the other cohort
/// exactly at its endowment utility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreMax {
    /// Id of the atom whose utility is maximized.
    pub atom: String,
    pub allocation: Allocation,
    pub value: Rational,
    /// Multipliers certifying optimality of `value` for [`core_max_lp`].
    pub dual: Vec<Rational>,
    /// Set when `ω` is Pareto optimal; the construction then proves nothing
    /// about non-competitive cores.
    pub trivial: bool,
}

/// Index of the atom the construction favours: the first atomic cohort.
pub(crate) fn favoured_atom(e: &Economy) -> Result<usize, AnalysisError> {
    if e.cohorts().len() != 2 {
        return Err(AnalysisError::UnsupportedShape(format!(
            "core-max construction needs exactly 2 cohorts, got {}",
            e.cohorts().len()
        )));
    }
    e.cohorts()
        .iter()
        .position(|c| c.atomic)
        .ok_or_else(|| AnalysisError::UnsupportedShape("no atomic cohort".into()))
}

/// `maximize a_atom·x_atom` subject to
/// `mass_atom x_atom + mass_other x_other ≤ ∫ω` and
/// `a_other·x_other = a_other·ω_other`, `x ≥ 0`. Columns are the atom's
/// bundle followed by the other cohort's.
pub fn core_max_lp(e: &Economy) -> Result<LinearProgram, AnalysisError> {
    let atom_index = favoured_atom(e)?;
    let atom = &e.cohorts()[atom_index];
    let other = &e.cohorts()[1 - atom_index];
    let l = e.commodities();
    let mut lp = LinearProgram::nonnegative(2 * l);
    lp.objective[..l].clone_from_slice(&atom.utility);
    let total = e.aggregate_endowment();
    for j in 0..l {
        let mut row = vec![Rational::zero(); 2 * l];
        row[j] = atom.mass.clone();
        row[l + j] = other.mass.clone();
        lp.add_row(row, Relation::Le, total[j].clone());
    }
    let mut row = vec![Rational::zero(); 2 * l];
    row[l..].clone_from_slice(&other.utility);
    lp.add_row(row, Relation::Eq, dot(&other.utility, &other.endowment));
    Ok(lp)
}

pub fn core_max_allocation(e: &Economy) -> Result<CoreMax, AnalysisError> {
    let lp = core_max_lp(e)?;
    let atom_index = favoured_atom(e)?;
    let l = e.commodities();
    let s = match solve_lp(&lp)? {
        LpOutcome::Optimal(s) => s,
        other => {
            return Err(AnalysisError::Internal(format!(
                "core-max program contains ω and is bounded, solver reported {:?}",
                other.status()
            )))
        }
    };
    let atom = &e.cohorts()[atom_index];
    let other = &e.cohorts()[1 - atom_index];
    let x_atom = Bundle::new(s.primal[..l].to_vec()).expect("x ≥ 0");
    let x_other = Bundle::new(s.primal[l..].to_vec()).expect("x ≥ 0");
    let allocation =
        Allocation::from_pairs([(atom.id.clone(), x_atom), (other.id.clone(), x_other)]);
    Ok(CoreMax {
        atom: atom.id.clone(),
        allocation,
        value: s.value,
        dual: s.dual,
        trivial: pareto_check(e)?.optimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::validate_economy;
    use crate::fixtures::{alloc, e0, e1};
    use crate::rational::frac;

    #[test]
    fn e0_core_max() {
        let cm = core_max_allocation(&e0()).unwrap();
        assert_eq!(cm.atom, "A1");
        assert_eq!(cm.value, frac(11, 12));
        assert_eq!(
            cm.allocation,
            alloc(&[("A1", &[(1, 1), (2, 3)]), ("C2", &[(0, 1), (1, 3)])])
        );
        assert!(!cm.trivial);
    }

    #[test]
    fn atom_flag_moved_to_continuum() {
        let mut doc = e0().to_document();
        doc.cohorts[0].atomic = false;
        doc.cohorts[1].atomic = true;
        let cm = core_max_allocation(&validate_economy(&doc).unwrap()).unwrap();
        assert_eq!(cm.atom, "C2");
        assert_eq!(cm.value, frac(11, 12));
        assert_eq!(
            cm.allocation,
            alloc(&[("C2", &[(2, 3), (1, 1)]), ("A1", &[(1, 3), (0, 1)])])
        );
    }

    #[test]
    fn trivial_economy_is_flagged() {
        let e = e1();
        let cm = core_max_allocation(&e).unwrap();
        assert!(cm.trivial);
        assert_eq!(cm.value, frac(3, 4));
        assert_eq!(cm.allocation, e.endowment_allocation());
    }

    #[test]
    fn needs_an_atom() {
        let mut doc = e0().to_document();
        doc.cohorts[0].atomic = false;
        let e = validate_economy(&doc).unwrap();
        assert!(matches!(
            core_max_allocation(&e),
            Err(AnalysisError::UnsupportedShape(_))
        ));
    }
}
