//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! The general program is first rewritten in standard form
//! `M w = h, w ≥ 0, h ≥ 0`: finite lower bounds shift a column, upper-only
//! bounds reflect it, free columns split into a difference, and a column
//! with both bounds gets an extra row `z + s = u - l`. One artificial per row
//! gives the phase-one basis. Artificial columns are kept in the tableau
//! (never re-entered) so their reduced costs expose `c_B B⁻¹`, from which the
//! row multipliers are read back.

use num_traits::{One, Signed, Zero};

use super::{FarkasCertificate, LinearProgram, LpOutcome, OptimalSolution, Relation, UnboundedRay};
use crate::rational::Rational;

enum ColumnMap {
    /// `x = lower + z`
    Shift { lower: Rational, col: usize },
    /// `x = upper - z`
    Reflect { upper: Rational, col: usize },
    /// `x = z⁺ - z⁻`
    Split { pos: usize, neg: usize },
}

impl ColumnMap {
    fn offset(&self) -> Rational {
        match self {
            ColumnMap::Shift { lower, .. } => lower.clone(),
            ColumnMap::Reflect { upper, .. } => upper.clone(),
            ColumnMap::Split { .. } => Rational::zero(),
        }
    }

    /// Adds `coef · x_j` expressed in structural columns to `row`.
    fn scatter(&self, coef: &Rational, row: &mut [Rational]) {
        match *self {
            ColumnMap::Shift { col, .. } => row[col] += coef,
            ColumnMap::Reflect { col, .. } => row[col] -= coef,
            ColumnMap::Split { pos, neg } => {
                row[pos] += coef;
                row[neg] -= coef;
            }
        }
    }

    /// Linear part of `x_j` given structural values `w`.
    fn gather(&self, w: &[Rational]) -> Rational {
        match *self {
            ColumnMap::Shift { col, .. } => w[col].clone(),
            ColumnMap::Reflect { col, .. } => -&w[col],
            ColumnMap::Split { pos, neg } => &w[pos] - &w[neg],
        }
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs `c_j - c_B B⁻¹ M_j` for the active objective.
    reduced: Vec<Rational>,
    first_artificial: usize,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[r] *= &inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        if !self.reduced[c].is_zero() {
            let factor = self.reduced[c].clone();
            for (v, p) in self.reduced.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        let mut reduced = costs.to_vec();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (r, v) in reduced.iter_mut().zip(row) {
                if !v.is_zero() {
                    *r -= cb * v;
                }
            }
        }
        self.reduced = reduced;
    }

    /// Runs Bland's rule to optimality or until an unbounded column appears.
    fn run(&mut self) -> Step {
        loop {
            let entering = (0..self.first_artificial).find(|&j| self.reduced[j].is_positive());
            let Some(c) = entering else {
                return Step::Optimal;
            };
            let mut leaving: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leaving {
                    None => true,
                    Some((best, best_ratio)) => {
                        ratio < *best_ratio
                            || (ratio == *best_ratio && self.basis[i] < self.basis[*best])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            match leaving {
                Some((r, _)) => self.pivot(r, c),
                None => return Step::Unbounded(c),
            }
        }
    }

    fn values(&self) -> Vec<Rational> {
        let mut w = vec![Rational::zero(); self.reduced.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            w[b] = self.rhs[i].clone();
        }
        w
    }
}

/// Solves `lp` (assumed validated). With `optimize = false` only phase one
/// runs and a feasible point is reported as `Optimal` with an empty dual.
pub(super) fn solve(lp: &LinearProgram, optimize: bool) -> LpOutcome {
    let n = lp.num_vars();

    let mut maps = Vec::with_capacity(n);
    let mut structural = 0usize;
    let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
    for j in 0..n {
        let map = match (&lp.lower[j], &lp.upper[j]) {
            (Some(l), u) => {
                let col = structural;
                structural += 1;
                if let Some(u) = u {
                    bound_rows.push((col, u - l));
                }
                ColumnMap::Shift {
                    lower: l.clone(),
                    col,
                }
            }
            (None, Some(u)) => {
                let col = structural;
                structural += 1;
                ColumnMap::Reflect {
                    upper: u.clone(),
                    col,
                }
            }
            (None, None) => {
                let pos = structural;
                structural += 2;
                ColumnMap::Split { pos, neg: pos + 1 }
            }
        };
        maps.push(map);
    }

    let original_rows = lp.rows.len();
    let m = original_rows + bound_rows.len();
    let slack_count = lp
        .rows
        .iter()
        .filter(|r| r.relation != Relation::Eq)
        .count()
        + bound_rows.len();
    let first_slack = structural;
    let first_artificial = first_slack + slack_count;
    let width = first_artificial + m;

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut next_slack = first_slack;
    for row in &lp.rows {
        let mut coeffs = vec![Rational::zero(); width];
        let mut b = row.rhs.clone();
        for (a, map) in row.coefficients.iter().zip(&maps) {
            if a.is_zero() {
                continue;
            }
            map.scatter(a, &mut coeffs);
            b -= a * map.offset();
        }
        match row.relation {
            Relation::Le => {
                coeffs[next_slack] = Rational::one();
                next_slack += 1;
            }
            Relation::Ge => {
                coeffs[next_slack] = -Rational::one();
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        rows.push(coeffs);
        rhs.push(b);
    }
    for (col, span) in &bound_rows {
        let mut coeffs = vec![Rational::zero(); width];
        coeffs[*col] = Rational::one();
        coeffs[next_slack] = Rational::one();
        next_slack += 1;
        rows.push(coeffs);
        rhs.push(span.clone());
    }

    let mut flipped = vec![false; m];
    for i in 0..m {
        if rhs[i].is_negative() {
            flipped[i] = true;
            for v in rows[i].iter_mut() {
                if !v.is_zero() {
                    *v = -&*v;
                }
            }
            rhs[i] = -&rhs[i];
        }
        rows[i][first_artificial + i] = Rational::one();
    }

    let mut t = Tableau {
        rows,
        rhs,
        basis: (first_artificial..first_artificial + m).collect(),
        reduced: Vec::new(),
        first_artificial,
    };

    // Phase one: maximize -Σ artificials.
    let mut phase_one = vec![Rational::zero(); width];
    for c in phase_one.iter_mut().skip(first_artificial) {
        *c = -Rational::one();
    }
    t.set_costs(&phase_one);
    let Step::Optimal = t.run() else {
        unreachable!("phase one objective is bounded above by zero");
    };

    // Row multipliers in the caller's sign convention: π_k = c_art - r_art,
    // undone for any row negated to make its right-hand side non-negative.
    let multipliers = |t: &Tableau, art_cost: &Rational| -> Vec<Rational> {
        (0..original_rows)
            .map(|i| {
                let pi = art_cost - &t.reduced[first_artificial + i];
                if flipped[i] {
                    -pi
                } else {
                    pi
                }
            })
            .collect()
    };

    let infeasibility: Rational = t
        .basis
        .iter()
        .zip(&t.rhs)
        .filter(|(&b, _)| b >= first_artificial)
        .map(|(_, v)| v.clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible(FarkasCertificate {
            multipliers: multipliers(&t, &-Rational::one()),
        });
    }

    // Drive zero-valued artificials out of the basis where possible; rows
    // where that is impossible are redundant and keep the artificial at 0.
    for i in 0..m {
        if t.basis[i] >= first_artificial {
            if let Some(c) = (0..first_artificial).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, c);
            }
        }
    }

    let to_primal = |w: &[Rational]| -> Vec<Rational> {
        maps.iter()
            .map(|map| map.offset() + map.gather(w))
            .collect()
    };
    let objective_value =
        |x: &[Rational]| -> Rational { lp.objective.iter().zip(x).map(|(c, v)| c * v).sum() };

    if !optimize {
        let primal = to_primal(&t.values());
        let value = objective_value(&primal);
        return LpOutcome::Optimal(OptimalSolution {
            primal,
            value,
            dual: Vec::new(),
        });
    }

    let mut costs = vec![Rational::zero(); width];
    for (c, map) in lp.objective.iter().zip(&maps) {
        map.scatter(c, &mut costs);
    }
    t.set_costs(&costs);
    match t.run() {
        Step::Optimal => {
            let primal = to_primal(&t.values());
            let value = objective_value(&primal);
            LpOutcome::Optimal(OptimalSolution {
                primal,
                value,
                dual: multipliers(&t, &Rational::zero()),
            })
        }
        Step::Unbounded(c) => {
            let point = to_primal(&t.values());
            let mut direction = vec![Rational::zero(); width];
            direction[c] = Rational::one();
            for (i, &b) in t.basis.iter().enumerate() {
                direction[b] = -&t.rows[i][c];
            }
            let ray = maps.iter().map(|map| map.gather(&direction)).collect();
            LpOutcome::Unbounded(UnboundedRay { point, ray })
        }
    }
}
