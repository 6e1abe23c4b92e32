//! Exact rational linear programming.
//!
//! Dense two-phase simplex over [`Rational`]. Pricing is Dantzig's rule until
//! a run of degenerate pivots, after which the solver switches to Bland's rule
//! for the rest of the solve, so every input terminates. Each optimal answer
//! carries a dual vector and is checked against it before being returned.

use num::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scalar::Rational;

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_RUN: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize c.x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    objective: Vec<Rational>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn maximize(objective: Vec<Rational>) -> Self {
        LinearProgram { objective, constraints: Vec::new() }
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.variables() {
            return Err(Error::dims(format!(
                "constraint row has {} coefficients, LP has {} variables",
                coeffs.len(),
                self.variables()
            )));
        }
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Adds a row given as `(variable, coefficient)` pairs; repeated variables
    /// accumulate.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) -> Result<()> {
        let mut coeffs = vec![Rational::zero(); self.variables()];
        for (j, c) in terms {
            let slot = coeffs
                .get_mut(*j)
                .ok_or_else(|| Error::dims(format!("variable {j} out of range")))?;
            *slot += c;
        }
        self.add(coeffs, relation, rhs)
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// True iff `x >= 0` satisfies every constraint exactly.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.variables()
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, x);
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal value; `None` unless optimal.
    pub value: Option<Rational>,
    /// Primal point; empty unless optimal.
    pub point: Vec<Rational>,
    /// One multiplier per constraint; empty unless optimal.
    pub duals: Vec<Rational>,
    pub pivots: usize,
}

impl LpSolution {
    /// Checks primal feasibility, dual feasibility (`A^T y >= c` with the sign
    /// of each `y_i` fixed by its relation) and `b.y = c.x`, all exactly.
    pub fn check_certificate(&self, lp: &LinearProgram) -> std::result::Result<(), String> {
        if self.status != LpStatus::Optimal {
            return Err(format!("status is {:?}", self.status));
        }
        if !lp.is_feasible(&self.point) {
            return Err("primal point is infeasible".into());
        }
        let value = self.value.as_ref().ok_or("missing value")?;
        if &lp.objective_at(&self.point) != value {
            return Err("objective at the point differs from the reported value".into());
        }
        if self.duals.len() != lp.constraints.len() {
            return Err("dual vector has the wrong length".into());
        }
        for (i, (c, y)) in lp.constraints.iter().zip(&self.duals).enumerate() {
            let ok = match c.relation {
                Relation::Le => !y.is_negative(),
                Relation::Ge => !y.is_positive(),
                Relation::Eq => true,
            };
            if !ok {
                return Err(format!("dual {i} has the wrong sign for {:?}", c.relation));
            }
        }
        for j in 0..lp.variables() {
            let col: Rational = lp
                .constraints
                .iter()
                .zip(&self.duals)
                .filter(|(c, y)| !c.coeffs[j].is_zero() && !y.is_zero())
                .map(|(c, y)| &c.coeffs[j] * y)
                .sum();
            if col < lp.objective[j] {
                return Err(format!("dual constraint for variable {j} is violated"));
            }
        }
        let dual_value: Rational = lp.constraints.iter().zip(&self.duals).map(|(c, y)| &c.rhs * y).sum();
        if &dual_value != value {
            return Err(format!("dual value {dual_value} differs from primal value {value}"));
        }
        Ok(())
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with_limits(lp, &Limits::from_env())
}

pub fn solve_lp_with_limits(lp: &LinearProgram, limits: &Limits) -> Result<LpSolution> {
    if lp.variables() > limits.lp_variables {
        return Err(Error::SizeGuard {
            what: "LP variables".into(),
            needed: lp.variables() as u128,
            limit: limits.lp_variables as u128,
        });
    }
    if lp.constraints.len() > limits.lp_constraints {
        return Err(Error::SizeGuard {
            what: "LP constraints".into(),
            needed: lp.constraints.len() as u128,
            limit: limits.lp_constraints as u128,
        });
    }
    let solution = Tableau::build(lp).solve();
    if solution.status == LpStatus::Optimal {
        solution
            .check_certificate(lp)
            .map_err(|e| Error::invalid(format!("simplex produced an invalid optimality certificate: {e}")))?;
    }
    Ok(solution)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Original,
    Slack,
    Artificial,
}

struct Tableau {
    n: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Column holding `e_i` in the initial tableau, per row.
    identity: Vec<usize>,
    flipped: Vec<bool>,
    objective: Vec<Rational>,
    reduced: Vec<Rational>,
    value: Rational,
    pivots: usize,
    bland: bool,
    degenerate_run: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.variables();
        let m = lp.constraints.len();
        let mut kinds = vec![ColumnKind::Original; n];
        let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        let mut relations = Vec::with_capacity(m);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let sign = if flip { -Rational::one() } else { Rational::one() };
            rows.push(c.coeffs.iter().map(|v| v * &sign).collect());
            rhs.push(&c.rhs * &sign);
            flipped.push(flip);
            relations.push(match (c.relation, flip) {
                (Relation::Eq, _) => Relation::Eq,
                (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
                (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
            });
        }
        // Slack and surplus columns first, then artificials.
        let mut identity = vec![0; m];
        let mut extra: Vec<(usize, Rational)> = Vec::new();
        for (i, rel) in relations.iter().enumerate() {
            match rel {
                Relation::Le => {
                    identity[i] = n + extra.len();
                    extra.push((i, Rational::one()));
                    kinds.push(ColumnKind::Slack);
                }
                Relation::Ge => {
                    extra.push((i, -Rational::one()));
                    kinds.push(ColumnKind::Slack);
                }
                Relation::Eq => {}
            }
        }
        for (i, rel) in relations.iter().enumerate() {
            if *rel != Relation::Le {
                identity[i] = n + extra.len();
                extra.push((i, Rational::one()));
                kinds.push(ColumnKind::Artificial);
            }
        }
        for row in rows.iter_mut() {
            row.resize(n + extra.len(), Rational::zero());
        }
        for (col, (i, v)) in extra.into_iter().enumerate() {
            rows[i][n + col] = v;
        }
        let mut objective = lp.objective.clone();
        objective.resize(kinds.len(), Rational::zero());
        let basis = identity.clone();
        Tableau {
            n,
            rows,
            rhs,
            basis,
            kinds,
            identity,
            flipped,
            objective,
            reduced: Vec::new(),
            value: Rational::zero(),
            pivots: 0,
            bland: false,
            degenerate_run: 0,
        }
    }

    fn price(&mut self, costs: &[Rational]) {
        let width = self.kinds.len();
        let mut reduced: Vec<Rational> = costs.iter().map(|c| -c).collect();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, slot) in reduced.iter_mut().enumerate().take(width) {
                let a = &self.rows[i][j];
                if !a.is_zero() {
                    *slot += cb * a;
                }
            }
            value += cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn entering(&self, allow_artificial: bool) -> Option<usize> {
        let candidates = self
            .reduced
            .iter()
            .enumerate()
            .filter(|(j, d)| d.is_negative() && (allow_artificial || self.kinds[*j] != ColumnKind::Artificial));
        if self.bland {
            candidates.map(|(j, _)| j).next()
        } else {
            candidates.min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0))).map(|(j, _)| j)
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[col];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        if !p.is_one() {
            for v in self.rows[row].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[row] /= &p;
        }
        let nonzero: Vec<usize> = (0..self.kinds.len()).filter(|&j| !self.rows[row][j].is_zero()).collect();
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.rows[i][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[i] -= &factor * &pivot_rhs;
            }
        }
        let factor = self.reduced[col].clone();
        if !factor.is_zero() {
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value -= &factor * &pivot_rhs;
        }
        if pivot_rhs.is_zero() {
            self.degenerate_run += 1;
            if self.degenerate_run > DEGENERATE_RUN {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn run(&mut self, allow_artificial: bool) -> Outcome {
        while let Some(col) = self.entering(allow_artificial) {
            match self.leaving(col) {
                Some(row) => self.pivot(row, col),
                None => return Outcome::Unbounded,
            }
        }
        Outcome::Optimal
    }

    fn solve(mut self) -> LpSolution {
        let has_artificial = self.kinds.contains(&ColumnKind::Artificial);
        if has_artificial {
            let costs: Vec<Rational> = self
                .kinds
                .iter()
                .map(|k| if *k == ColumnKind::Artificial { -Rational::one() } else { Rational::zero() })
                .collect();
            self.price(&costs);
            // Phase one is bounded above by zero.
            self.run(true);
            if self.value.is_negative() {
                return self.finish(LpStatus::Infeasible);
            }
            self.drive_out_artificials();
        }
        let costs = self.objective.clone();
        self.price(&costs);
        self.bland = false;
        self.degenerate_run = 0;
        match self.run(false) {
            Outcome::Optimal => self.finish(LpStatus::Optimal),
            Outcome::Unbounded => self.finish(LpStatus::Unbounded),
        }
    }

    /// Pivots zero-valued basic artificials out where a non-artificial column
    /// allows it; rows where none does are redundant and keep theirs.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.rows.len() {
            if self.kinds[self.basis[i]] != ColumnKind::Artificial {
                continue;
            }
            if let Some(j) = (0..self.kinds.len())
                .find(|&j| self.kinds[j] != ColumnKind::Artificial && !self.rows[i][j].is_zero())
            {
                self.pivot(i, j);
            }
        }
    }

    fn finish(self, status: LpStatus) -> LpSolution {
        if status != LpStatus::Optimal {
            return LpSolution { status, value: None, point: Vec::new(), duals: Vec::new(), pivots: self.pivots };
        }
        let mut point = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                point[b] = self.rhs[i].clone();
            }
        }
        let duals = self
            .identity
            .iter()
            .zip(&self.flipped)
            .map(|(&col, &flip)| if flip { -self.reduced[col].clone() } else { self.reduced[col].clone() })
            .collect();
        LpSolution { status, value: Some(self.value), point, duals, pivots: self.pivots }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn r(n: i64) -> Rational {
        Rational::from_ratio(n, 1)
    }

    #[test]
    fn box_constraints() {
        let mut lp = LinearProgram::maximize(vec![r(1), r(1)]);
        lp.add(vec![r(1), r(0)], Relation::Le, r(1)).unwrap();
        lp.add(vec![r(0), r(1)], Relation::Le, r(1)).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.value, Some(r(2)));
        assert_eq!(s.point, vec![r(1), r(1)]);
    }

    #[test]
    fn negative_upper_bound_is_infeasible() {
        let mut lp = LinearProgram::maximize(vec![r(1)]);
        lp.add(vec![r(1)], Relation::Le, r(-1)).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::maximize(vec![r(1), r(0)]);
        lp.add(vec![r(1), r(-1)], Relation::Le, r(1)).unwrap();
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equalities_and_redundant_rows() {
        // x + y = 1 stated twice, x - y >= -1/2 written with negative rhs.
        let mut lp = LinearProgram::maximize(vec![r(2), r(1)]);
        lp.add(vec![r(1), r(1)], Relation::Eq, r(1)).unwrap();
        lp.add(vec![r(2), r(2)], Relation::Eq, r(2)).unwrap();
        lp.add(vec![r(-1), r(1)], Relation::Le, Rational::from_ratio(1, 2)).unwrap();
        lp.add(vec![r(1), r(0)], Relation::Le, Rational::from_ratio(3, 4)).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.value, Some(Rational::from_ratio(7, 4)));
        assert!(s.check_certificate(&lp).is_ok());
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        let q = |n, d| Rational::from_ratio(n, d);
        let mut lp = LinearProgram::maximize(vec![q(3, 4), r(-20), q(1, 2), r(-6)]);
        lp.add(vec![q(1, 4), r(-8), r(-1), r(9)], Relation::Le, r(0)).unwrap();
        lp.add(vec![q(1, 2), r(-12), q(-1, 2), r(3)], Relation::Le, r(0)).unwrap();
        lp.add(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1)).unwrap();
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(s.check_certificate(&lp).is_ok());
    }

    #[test]
    fn size_guard() {
        let lp = LinearProgram::maximize(vec![r(1); 3]);
        let limits = Limits { lp_variables: 2, ..Limits::default() };
        assert!(matches!(solve_lp_with_limits(&lp, &limits), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn empty_constraint_set() {
        let lp = LinearProgram::maximize(vec![r(-1), r(0)]);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.value, Some(r(0)));
        assert!(s.duals.is_empty());
    }

    #[test]
    fn bad_row_length_rejected() {
        let mut lp = LinearProgram::maximize(vec![r(1)]);
        assert!(lp.add(vec![r(1), r(1)], Relation::Le, r(1)).is_err());
    }
}
