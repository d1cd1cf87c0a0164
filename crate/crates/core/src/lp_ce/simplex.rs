//! Dense two-phase tableau simplex over exact rationals with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x ≥ 0`. Bland's rule (smallest entering
//! index, smallest leaving basic index on ratio ties) guarantees termination
//! on degenerate problems, which the CE systems always are (every CE row has
//! right-hand side zero).

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub a: Vec<Vec<Rational>>,
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    /// Reduced costs; the last entry holds minus the objective value.
    obj: Vec<Rational>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> &Rational {
        &self.rows[r][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if k != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        if !self.obj[col].is_zero() {
            let f = self.obj[col].clone();
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = col;
    }

    /// Bland iterations over columns `< limit`. Returns false if unbounded.
    fn run(&mut self, limit: usize) -> bool {
        loop {
            let Some(col) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(r) / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }

    /// Replaces the objective row with reduced costs for `cost`.
    fn set_objective(&mut self, cost: &[Rational]) {
        let mut obj: Vec<Rational> = cost.to_vec();
        obj.resize(self.width + 1, Rational::zero());
        for (row, &bj) in self.rows.iter().zip(&self.basis) {
            let cb = obj[bj].clone();
            if !cb.is_zero() {
                for (v, rv) in obj.iter_mut().zip(row) {
                    *v -= &cb * rv;
                }
            }
        }
        self.obj = obj;
    }
}

pub fn solve(lp: &StandardForm) -> LpOutcome {
    let m = lp.a.len();
    let nvars = lp.c.len();
    assert_eq!(lp.b.len(), m, "one right-hand side per row");
    let width = nvars + m;

    let mut rows = Vec::with_capacity(m);
    for (r, (coeffs, rhs)) in lp.a.iter().zip(&lp.b).enumerate() {
        assert_eq!(coeffs.len(), nvars, "row {r} has the wrong width");
        let flip = rhs.is_negative();
        let mut row: Vec<Rational> = coeffs
            .iter()
            .map(|v| if flip { -v } else { v.clone() })
            .collect();
        row.resize(width + 1, Rational::zero());
        row[nvars + r] = Rational::from_integer(1.into());
        row[width] = if flip { -rhs } else { rhs.clone() };
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        obj: Vec::new(),
        basis: (nvars..width).collect(),
        width,
    };

    // Phase 1: minimise the sum of artificials.
    let mut phase1 = vec![Rational::zero(); width];
    for v in &mut phase1[nvars..] {
        *v = Rational::from_integer(1.into());
    }
    t.set_objective(&phase1);
    let bounded = t.run(width);
    debug_assert!(bounded, "phase 1 is bounded below by zero");
    if !t.obj[width].is_zero() {
        return LpOutcome::Infeasible;
    }

    // Pivot zero-valued artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= nvars {
            match (0..nvars).find(|&j| !t.rows[r][j].is_zero()) {
                Some(col) => t.pivot(r, col),
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase 2 over the original columns only.
    t.set_objective(&lp.c);
    if !t.run(nvars) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (row, &bj) in t.rows.iter().zip(&t.basis) {
        x[bj] = row[width].clone();
    }
    let value = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpOutcome::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let lp = StandardForm {
            a: vec![v(&[1, 2, 1, 0]), v(&[3, 1, 0, 1])],
            b: v(&[4, 6]),
            c: v(&[-1, -1, 0, 0]),
        };
        let LpOutcome::Optimal { x, value } = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(value, ratio(-14, 5));
        assert_eq!(&x[..2], &[ratio(8, 5), ratio(6, 5)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = StandardForm {
            a: vec![v(&[1, 1]), v(&[1, 1])],
            b: v(&[1, 2]),
            c: v(&[0, 0]),
        };
        assert_eq!(solve(&lp), LpOutcome::Infeasible);

        let lp = StandardForm {
            a: vec![v(&[1, -1])],
            b: v(&[1]),
            c: v(&[0, -1]),
        };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_and_negative_rhs() {
        let lp = StandardForm {
            a: vec![v(&[1, 1]), v(&[-2, -2])],
            b: v(&[1, -2]),
            c: v(&[1, 0]),
        };
        let LpOutcome::Optimal { x, value } = solve(&lp) else {
            panic!("expected optimum");
        };
        assert_eq!(value, int(0));
        assert_eq!(x, v(&[0, 1]));
    }
}
