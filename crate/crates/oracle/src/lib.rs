//! Brute-force reference computations. Nothing here shares code with the
//! simplex solver or the analysis routines it is used to check.

// Row reduction reads most clearly with explicit indices.
#![allow(clippy::needless_range_loop)]

use linex_core::economy::Economy;
use linex_core::lp::{LinearProgram, Relation};
use linex_core::rational::{dot, frac, Rational};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// One linear constraint `coefficients · x (relation) rhs`.
#[derive(Debug, Clone)]
struct Halfspace {
    coefficients: Vec<Rational>,
    relation: Relation,
    rhs: Rational,
}

fn holds(h: &Halfspace, x: &[Rational]) -> bool {
    let lhs = dot(&h.coefficients, x);
    match h.relation {
        Relation::Le => lhs <= h.rhs,
        Relation::Ge => lhs >= h.rhs,
        Relation::Eq => lhs == h.rhs,
    }
}

/// Rows plus bounds, all as explicit constraints.
fn halfspaces(lp: &LinearProgram) -> Vec<Halfspace> {
    let n = lp.num_vars();
    let mut out: Vec<Halfspace> = lp
        .rows
        .iter()
        .map(|r| Halfspace {
            coefficients: r.coefficients.clone(),
            relation: r.relation,
            rhs: r.rhs.clone(),
        })
        .collect();
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = frac(1, 1);
        if let Some(lo) = &lp.lower[j] {
            out.push(Halfspace {
                coefficients: e.clone(),
                relation: Relation::Ge,
                rhs: lo.clone(),
            });
        }
        if let Some(hi) = &lp.upper[j] {
            out.push(Halfspace {
                coefficients: e,
                relation: Relation::Le,
                rhs: hi.clone(),
            });
        }
    }
    out
}

/// Rank of a set of rows by Gaussian elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let v = &f * &m[r][k];
                    m[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Unique solution of the square-or-tall system `A x = b`, if `A` has full
/// column rank and the system is consistent.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.first()?.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut r = 0;
    for c in 0..n {
        let p = (r..m.len()).find(|&i| !m[i][c].is_zero())?;
        m.swap(r, p);
        let inv = frac(1, 1) / &m[r][c];
        for k in c..=n {
            m[r][k] *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..=n {
                    let v = &f * &m[r][k];
                    m[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

#[derive(Debug, Clone, PartialEq)]
pub enum VertexResult {
    /// Largest objective over all vertices, `None` when there are none
    /// (the region is empty).
    Enumerated {
        best: Option<Rational>,
        vertices: usize,
    },
    /// More candidate bases than the caller's budget.
    TooLarge { subsets: u128 },
}

/// Rewrites every column without a lower bound as a difference `u - v` of
/// two non-negative columns, turning upper bounds into rows. Every column of
/// the result is bounded below, so a non-empty region has a vertex, and the
/// optimum is unchanged.
fn lift(lp: &LinearProgram) -> LinearProgram {
    let n = lp.num_vars();
    // column j maps to (positive part, optional negative part)
    let mut map = Vec::with_capacity(n);
    let mut width = 0;
    for j in 0..n {
        if lp.lower[j].is_some() {
            map.push((width, None));
            width += 1;
        } else {
            map.push((width, Some(width + 1)));
            width += 2;
        }
    }
    let spread = |coefficients: &[Rational]| {
        let mut row = vec![Rational::zero(); width];
        for (j, c) in coefficients.iter().enumerate() {
            let (u, v) = map[j];
            row[u] = c.clone();
            if let Some(v) = v {
                row[v] = -c.clone();
            }
        }
        row
    };
    let mut out = LinearProgram::nonnegative(width);
    out.objective = spread(&lp.objective);
    for r in &lp.rows {
        out.add_row(spread(&r.coefficients), r.relation, r.rhs.clone());
    }
    for j in 0..n {
        let (u, v) = map[j];
        match v {
            None => out.set_bounds(u, lp.lower[j].clone(), lp.upper[j].clone()),
            Some(_) => {
                if let Some(hi) = &lp.upper[j] {
                    let mut unit = vec![Rational::zero(); n];
                    unit[j] = frac(1, 1);
                    out.add_row(spread(&unit), Relation::Le, hi.clone());
                }
            }
        }
    }
    out
}

/// A constraint scaled to integer data.
struct IntHalfspace {
    coefficients: Vec<i128>,
    relation: Relation,
    rhs: i128,
}

fn to_integer(h: &Halfspace) -> Option<IntHalfspace> {
    let lcm = h
        .coefficients
        .iter()
        .chain(std::iter::once(&h.rhs))
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scale = |q: &Rational| {
        (q * Rational::from_integer(lcm.clone()))
            .to_integer()
            .to_i128()
    };
    Some(IntHalfspace {
        coefficients: h.coefficients.iter().map(scale).collect::<Option<_>>()?,
        relation: h.relation,
        rhs: scale(&h.rhs)?,
    })
}

/// Solves a square integer system by fraction-free Gauss-Jordan elimination.
/// Every intermediate entry is a minor of the input, so it stays small for
/// small data; overflow is reported rather than wrapped. Returns
/// `(numerators, determinant)` with a positive determinant, `Ok(None)` when
/// singular.
fn solve_integer(rows: &[&[i128]], rhs: &[i128]) -> Result<Option<(Vec<i128>, i128)>, ()> {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut row = r.to_vec();
            row.push(*b);
            row
        })
        .collect();
    let mut prev = 1i128;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| m[i][k] != 0) else {
            return Ok(None);
        };
        m.swap(k, p);
        let pivot = m[k][k];
        for i in 0..n {
            if i == k {
                continue;
            }
            let factor = m[i][k];
            for j in 0..=n {
                if j == k {
                    continue;
                }
                let v = pivot
                    .checked_mul(m[i][j])
                    .and_then(|a| factor.checked_mul(m[k][j]).and_then(|b| a.checked_sub(b)))
                    .ok_or(())?;
                m[i][j] = v / prev;
            }
            m[i][k] = 0;
        }
        prev = pivot;
    }
    let det = m[n - 1][n - 1];
    let sign = det.signum();
    Ok(Some(((0..n).map(|i| m[i][n] * sign).collect(), det * sign)))
}

/// Whether the integer point `num / det` satisfies `h`; `None` on overflow.
fn holds_integer(h: &IntHalfspace, num: &[i128], det: i128) -> Option<bool> {
    let mut lhs = 0i128;
    for (c, x) in h.coefficients.iter().zip(num) {
        lhs = lhs.checked_add(c.checked_mul(*x)?)?;
    }
    let rhs = h.rhs.checked_mul(det)?;
    Some(match h.relation {
        Relation::Le => lhs <= rhs,
        Relation::Ge => lhs >= rhs,
        Relation::Eq => lhs == rhs,
    })
}

/// Enumerates every basic solution of `lp` (a maximal independent set of
/// equality rows plus a subset of the inequalities, solved as a square
/// system) and keeps the feasible ones. Columns without a lower bound are
/// split first, so the best vertex value is the optimum whenever the
/// program is bounded.
pub fn vertex_optimum(lp: &LinearProgram, max_subsets: u128) -> VertexResult {
    let lp = lift(lp);
    let n = lp.num_vars();
    let all = halfspaces(&lp);
    let (eqs, ineqs): (Vec<&Halfspace>, Vec<&Halfspace>) =
        all.iter().partition(|h| h.relation == Relation::Eq);

    let mut basis: Vec<&Halfspace> = Vec::new();
    for h in &eqs {
        let mut rows: Vec<Vec<Rational>> = basis.iter().map(|b| b.coefficients.clone()).collect();
        rows.push(h.coefficients.clone());
        if rank(&rows) > basis.len() {
            basis.push(h);
        }
    }
    let augmented: Vec<Vec<Rational>> = eqs
        .iter()
        .map(|h| {
            let mut r = h.coefficients.clone();
            r.push(h.rhs.clone());
            r
        })
        .collect();
    if !eqs.is_empty() && rank(&augmented) > basis.len() {
        // inconsistent equalities
        return VertexResult::Enumerated {
            best: None,
            vertices: 0,
        };
    }

    let k = n - basis.len();
    let subsets = binomial(ineqs.len(), k);
    if subsets > max_subsets {
        return VertexResult::TooLarge { subsets };
    }
    let int_all: Option<Vec<IntHalfspace>> = all.iter().map(to_integer).collect();
    let int_basis: Option<Vec<IntHalfspace>> = basis.iter().map(|h| to_integer(h)).collect();
    let int_ineqs: Option<Vec<IntHalfspace>> = ineqs.iter().map(|h| to_integer(h)).collect();

    let mut best: Option<Rational> = None;
    let mut vertices = 0;
    let mut consider = |x: Vec<Rational>| {
        vertices += 1;
        let v = dot(&lp.objective, &x);
        if best.as_ref().is_none_or(|b| v > *b) {
            best = Some(v);
        }
    };
    let exact = |subset: &[usize]| -> Option<Vec<Rational>> {
        let mut a: Vec<Vec<Rational>> = basis.iter().map(|h| h.coefficients.clone()).collect();
        let mut b: Vec<Rational> = basis.iter().map(|h| h.rhs.clone()).collect();
        for &i in subset {
            a.push(ineqs[i].coefficients.clone());
            b.push(ineqs[i].rhs.clone());
        }
        let x = solve_unique(&a, &b)?;
        all.iter().all(|h| holds(h, &x)).then_some(x)
    };
    for_each_subset(ineqs.len(), k, &mut |subset| {
        if let (Some(ia), Some(ib), Some(ii)) = (&int_all, &int_basis, &int_ineqs) {
            let rows: Vec<&[i128]> = ib
                .iter()
                .map(|h| h.coefficients.as_slice())
                .chain(subset.iter().map(|&i| ii[i].coefficients.as_slice()))
                .collect();
            let rhs: Vec<i128> = ib
                .iter()
                .map(|h| h.rhs)
                .chain(subset.iter().map(|&i| ii[i].rhs))
                .collect();
            match solve_integer(&rows, &rhs) {
                Ok(None) => return,
                Ok(Some((num, det))) => {
                    let feasible: Option<bool> = ia
                        .iter()
                        .try_fold(true, |ok, h| Some(ok && holds_integer(h, &num, det)?));
                    match feasible {
                        Some(false) => return,
                        Some(true) => {
                            let d = Rational::from_integer(det.into());
                            consider(
                                num.iter()
                                    .map(|v| Rational::from_integer((*v).into()) / &d)
                                    .collect(),
                            );
                            return;
                        }
                        None => {}
                    }
                }
                Err(()) => {}
            }
        }
        if let Some(x) = exact(subset) {
            consider(x);
        }
    });
    VertexResult::Enumerated { best, vertices }
}

#[cfg(test)]
fn vertex_optimum_exact(lp: &LinearProgram) -> Option<Rational> {
    // Pure rational reference for the integer fast path.
    let lp = lift(lp);
    let n = lp.num_vars();
    let all = halfspaces(&lp);
    let mut best: Option<Rational> = None;
    for_each_subset(all.len(), n, &mut |subset| {
        let a: Vec<Vec<Rational>> = subset
            .iter()
            .map(|&i| all[i].coefficients.clone())
            .collect();
        let b: Vec<Rational> = subset.iter().map(|&i| all[i].rhs.clone()).collect();
        if let Some(x) = solve_unique(&a, &b) {
            if all.iter().all(|h| holds(h, &x)) {
                let v = dot(&lp.objective, &x);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
        }
    });
    best
}

/// Best utility the first atomic cohort of a two-cohort economy reaches on
/// the grid of bundles with the given denominator, subject to resources and
/// to the other cohort reaching its endowment utility. Exhaustive, so only
/// usable for a handful of goods.
pub fn core_max_on_grid(e: &Economy, denominator: i64) -> Option<Rational> {
    let atom = e.cohorts().iter().position(|c| c.atomic)?;
    let a = &e.cohorts()[atom];
    let o = &e.cohorts()[1 - atom];
    let total = e.aggregate_endowment();
    let l = e.commodities();
    let reserve = dot(&o.utility, &o.endowment);
    let caps: Vec<i64> = (0..l)
        .map(|j| {
            let cap = &total[j] / &a.mass * frac(denominator, 1);
            cap.floor().to_integer().try_into().expect("small grid")
        })
        .collect();
    let mut best: Option<Rational> = None;
    let mut idx = vec![0i64; l];
    loop {
        let x: Vec<Rational> = idx.iter().map(|&k| frac(k, denominator)).collect();
        // The other cohort may take any share of what is left, so the
        // constraint holds iff the whole remainder is worth enough to it.
        let rest: Vec<Rational> = (0..l)
            .map(|j| (&total[j] - &a.mass * &x[j]) / &o.mass)
            .collect();
        if rest.iter().all(|r| !r.is_negative()) && dot(&o.utility, &rest) >= reserve {
            let v = dot(&a.utility, &x);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        let mut j = 0;
        loop {
            if j == l {
                return best;
            }
            idx[j] += 1;
            if idx[j] <= caps[j] {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Maximum of `a · x` over `x ≥ 0` with `p · x ≤ budget`, by checking every
/// single-good corner of the budget simplex.
pub fn budget_corner_max(a: &[Rational], p: &[Rational], budget: &Rational) -> Rational {
    a.iter()
        .zip(p)
        .map(|(aj, pj)| aj * budget / pj)
        .max()
        .unwrap_or_else(Rational::zero)
}
