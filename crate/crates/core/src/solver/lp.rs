//! Dense two-phase simplex with Bland's rule.
//!
//! Generic over [`Scalar`], so the same code runs in exact rationals and in
//! `f64`. Problems here are small (a few hundred rows at most), and exact
//! pivoting keeps certificates reproducible bit for bit.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
struct Row<T> {
    coeffs: Vec<(usize, T)>,
    relation: Relation,
    rhs: T,
}

/// `maximize c.x` subject to linear rows, with `x >= 0` unless a variable
/// is declared free.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    vars: usize,
    free: Vec<bool>,
    objective: Vec<T>,
    rows: Vec<Row<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub objective: T,
    pub values: Vec<T>,
    pub pivots: usize,
}

const MAX_PIVOTS: usize = 1_000_000;

impl<T: Scalar> LinearProgram<T> {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            free: vec![false; vars],
            objective: vec![T::zero(); vars],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn set_objective(&mut self, var: usize, c: T) {
        self.objective[var] = c;
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, T)>, relation: Relation, rhs: T) {
        debug_assert!(coeffs.iter().all(|(j, _)| *j < self.vars));
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn maximize(&self) -> Result<LpSolution<T>> {
        Tableau::build(self).solve(self)
    }
}

struct Tableau<T> {
    a: Vec<Vec<T>>,
    basis: Vec<usize>,
    /// Reduced costs, with minus the objective value in the last slot.
    d: Vec<T>,
    /// Column of the negative part of each free variable.
    neg: Vec<Option<usize>>,
    /// First artificial column; everything before it is structural or slack.
    art0: usize,
    pivots: usize,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let mut neg = vec![None; lp.vars];
        let mut next = lp.vars;
        for (j, f) in lp.free.iter().enumerate() {
            if *f {
                neg[j] = Some(next);
                next += 1;
            }
        }
        let slack0 = next;
        let slacks = lp.rows.iter().filter(|r| r.relation != Relation::Eq).count();
        let art0 = slack0 + slacks;

        // Normalize signs first so we know which rows can start on a slack.
        let mut dense: Vec<(Vec<T>, Option<usize>)> = Vec::with_capacity(lp.rows.len());
        let mut slack = slack0;
        for row in &lp.rows {
            let mut v = vec![T::zero(); art0 + 1];
            for (j, c) in &row.coeffs {
                v[*j] += c.clone();
                if let Some(nj) = neg[*j] {
                    v[nj] -= c.clone();
                }
            }
            let mut own_slack = None;
            match row.relation {
                Relation::Le => {
                    v[slack] = T::one();
                    own_slack = Some(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    v[slack] = -T::one();
                    own_slack = Some(slack);
                    slack += 1;
                }
                Relation::Eq => {}
            }
            v[art0] = row.rhs.clone();
            if v[art0].is_negative() {
                for e in v.iter_mut() {
                    *e = -e.clone();
                }
            }
            let basic_slack = own_slack.filter(|&s| v[s].is_one());
            dense.push((v, basic_slack));
        }

        let arts = dense.iter().filter(|(_, s)| s.is_none()).count();
        let width = art0 + arts;
        let mut a = Vec::with_capacity(dense.len());
        let mut basis = Vec::with_capacity(dense.len());
        let mut art = art0;
        for (v, basic_slack) in dense {
            let mut row = vec![T::zero(); width + 1];
            let (body, rhs) = v.split_at(art0);
            row[..art0].clone_from_slice(body);
            row[width] = rhs[0].clone();
            match basic_slack {
                Some(s) => basis.push(s),
                None => {
                    row[art] = T::one();
                    basis.push(art);
                    art += 1;
                }
            }
            a.push(row);
        }
        Self {
            a,
            basis,
            d: Vec::new(),
            neg,
            art0,
            pivots: 0,
        }
    }

    fn width(&self) -> usize {
        self.a.first().map_or(self.art0, |r| r.len() - 1)
    }

    fn price(&mut self, cost: &[T]) {
        let w = self.width();
        let mut d: Vec<T> = cost.to_vec();
        d.resize(w + 1, T::zero());
        for (i, row) in self.a.iter().enumerate() {
            let cb = &cost.get(self.basis[i]).cloned().unwrap_or_else(T::zero);
            if cb.is_zero() {
                continue;
            }
            for (dj, aij) in d.iter_mut().zip(row) {
                if !aij.is_zero() {
                    *dj -= cb.clone() * aij.clone();
                }
            }
        }
        self.d = d;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        self.pivots += 1;
        let inv = T::one() / self.a[r][e].clone();
        for v in self.a[r].iter_mut() {
            if !v.is_zero() {
                *v *= inv.clone();
            }
        }
        let pivot_row = self.a[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &j in &nz {
                row[j] -= f.clone() * pivot_row[j].clone();
            }
        }
        if !self.d[e].is_zero() {
            let f = self.d[e].clone();
            for &j in &nz {
                self.d[j] -= f.clone() * pivot_row[j].clone();
            }
        }
        self.basis[r] = e;
    }

    /// Runs simplex iterations over columns `< limit`. Returns false when
    /// the objective is unbounded.
    fn iterate(&mut self, limit: usize) -> Result<bool> {
        let rhs = self.width();
        loop {
            let Some(e) = (0..limit).find(|&j| self.d[j].is_strictly_positive()) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.a.len() {
                let aie = &self.a[i][e];
                if !aie.is_strictly_positive() {
                    continue;
                }
                let ratio = self.a[i][rhs].clone() / aie.clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            if self.pivots >= MAX_PIVOTS {
                bail!(Invariant, "simplex did not terminate within {MAX_PIVOTS} pivots");
            }
            self.pivot(r, e);
        }
    }

    fn solve(mut self, lp: &LinearProgram<T>) -> Result<LpSolution<T>> {
        let w = self.width();
        if w > self.art0 {
            let mut cost = vec![T::zero(); w];
            for c in cost.iter_mut().skip(self.art0) {
                *c = -T::one();
            }
            self.price(&cost);
            self.iterate(w)?;
            if self.d[w].is_strictly_positive() {
                bail!(Invariant, "linear program is infeasible");
            }
            self.drive_out_artificials();
        }
        let mut cost = vec![T::zero(); self.art0];
        for (j, c) in lp.objective.iter().enumerate() {
            cost[j] = c.clone();
            if let Some(nj) = self.neg[j] {
                cost[nj] = -c.clone();
            }
        }
        self.price(&cost);
        if !self.iterate(self.art0)? {
            bail!(Invariant, "linear program is unbounded");
        }
        let rhs = self.width();
        let mut col = vec![T::zero(); self.art0];
        for (i, &b) in self.basis.iter().enumerate() {
            col[b] = self.a[i][rhs].clone();
        }
        let values = (0..lp.vars)
            .map(|j| match self.neg[j] {
                Some(nj) => col[j].clone() - col[nj].clone(),
                None => col[j].clone(),
            })
            .collect();
        Ok(LpSolution {
            objective: -self.d[rhs].clone(),
            values,
            pivots: self.pivots,
        })
    }

    /// After phase one, pivots artificial variables out of the basis, drops
    /// redundant rows, and removes the artificial columns.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.art0 {
                match (0..self.art0).find(|&j| !self.a[i][j].is_negligible()) {
                    Some(e) => self.pivot(i, e),
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        let w = self.width();
        for row in self.a.iter_mut() {
            let rhs = row[w].clone();
            row.truncate(self.art0);
            row.push(rhs);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::<Rational>::new(2);
        lp.set_objective(0, ratio(3, 1));
        lp.set_objective(1, ratio(5, 1));
        lp.add_row(vec![(0, ratio(1, 1))], Relation::Le, ratio(4, 1));
        lp.add_row(vec![(1, ratio(2, 1))], Relation::Le, ratio(12, 1));
        lp.add_row(vec![(0, ratio(3, 1)), (1, ratio(2, 1))], Relation::Le, ratio(18, 1));
        let s = lp.maximize().unwrap();
        assert_eq!(s.objective, ratio(36, 1));
        assert_eq!(s.values, vec![ratio(2, 1), ratio(6, 1)]);
    }

    #[test]
    fn equalities_free_variables_and_negative_rhs() {
        // max -z with z free, z >= x - 1, x + y = 1, y >= 1/3 -> x = 2/3, z = -1/3
        let mut lp = LinearProgram::<Rational>::new(3);
        lp.set_free(2);
        lp.set_objective(2, ratio(-1, 1));
        lp.add_row(vec![(2, ratio(1, 1)), (0, ratio(-1, 1))], Relation::Ge, ratio(-1, 1));
        lp.add_row(vec![(0, ratio(1, 1)), (1, ratio(1, 1))], Relation::Eq, ratio(1, 1));
        lp.add_row(vec![(1, ratio(1, 1))], Relation::Ge, ratio(1, 3));
        let s = lp.maximize().unwrap();
        assert_eq!(s.objective, ratio(1, 1));
        assert_eq!(s.values[2], ratio(-1, 1));
        let mut lp2 = lp.clone();
        lp2.set_objective(0, ratio(1, 1));
        lp2.set_objective(2, ratio(0, 1));
        let s = lp2.maximize().unwrap();
        assert_eq!(s.values[0], ratio(2, 3));
        assert_eq!(s.objective, ratio(2, 3));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::<Rational>::new(2);
        lp.set_objective(0, ratio(1, 1));
        lp.add_row(vec![(0, ratio(1, 1)), (1, ratio(1, 1))], Relation::Eq, ratio(1, 1));
        lp.add_row(vec![(0, ratio(2, 1)), (1, ratio(2, 1))], Relation::Eq, ratio(2, 1));
        let s = lp.maximize().unwrap();
        assert_eq!(s.objective, ratio(1, 1));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::<Rational>::new(1);
        lp.add_row(vec![(0, ratio(1, 1))], Relation::Le, ratio(-1, 1));
        assert!(matches!(lp.maximize(), Err(crate::Error::Invariant(_))));
        let mut lp = LinearProgram::<f64>::new(1);
        lp.set_objective(0, 1.0);
        assert!(lp.maximize().is_err());
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook rule; Bland's rule ends.
        let mut lp = LinearProgram::<Rational>::new(4);
        for (j, c) in [(0, ratio(3, 4)), (1, ratio(-150, 1)), (2, ratio(1, 50)), (3, ratio(-6, 1))] {
            lp.set_objective(j, c);
        }
        lp.add_row(
            vec![(0, ratio(1, 4)), (1, ratio(-60, 1)), (2, ratio(-1, 25)), (3, ratio(9, 1))],
            Relation::Le,
            ratio(0, 1),
        );
        lp.add_row(
            vec![(0, ratio(1, 2)), (1, ratio(-90, 1)), (2, ratio(-1, 50)), (3, ratio(3, 1))],
            Relation::Le,
            ratio(0, 1),
        );
        lp.add_row(vec![(2, ratio(1, 1))], Relation::Le, ratio(1, 1));
        let s = lp.maximize().unwrap();
        assert_eq!(s.objective, ratio(1, 20));
    }
}
