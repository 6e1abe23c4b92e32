use crate::error::{Error, Result};
use crate::model::PcpGame;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Literal {
    /// 0-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn eval(&self, value: usize) -> bool {
        (value == 1) == self.positive
    }
}

/// A 1-in-3 3SAT formula: every clause must have exactly one true literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneInThreeFormula {
    pub variables: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl OneInThreeFormula {
    pub fn validate(&self) -> Result<()> {
        if self.clauses.is_empty() {
            return Err(Error::invalid("formula has no clauses"));
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var >= self.variables) {
                return Err(Error::invalid(format!("clause {} uses variable {} of {}", i + 1, l.var + 1, self.variables)));
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::invalid(format!("clause {} repeats a variable", i + 1)));
            }
        }
        Ok(())
    }

    /// Fraction of clauses with exactly one true literal.
    pub fn satisfied_fraction<S: Scalar>(&self, assignment: &[usize]) -> S {
        let good = self
            .clauses
            .iter()
            .filter(|c| c.iter().filter(|l| l.eval(assignment[l.var])).count() == 1)
            .count();
        S::from_ratio(good as i64, self.clauses.len() as i64)
    }
}

/// A PCP game built from a formula, with the position-to-variable map.
#[derive(Clone, Debug, PartialEq)]
pub struct PcpFromFormula<S> {
    pub game: PcpGame<S>,
    /// Position to original 0-based variable.
    pub variables: Vec<usize>,
}

impl<S> PcpFromFormula<S> {
    /// Restricts an assignment of the original variables to the positions.
    pub fn proof_from_assignment(&self, assignment: &[usize]) -> Vec<usize> {
        self.variables.iter().map(|&v| assignment[v]).collect()
    }
}

/// One check per clause, uniform over clauses, reading the clause variables
/// in ascending order and accepting iff exactly one literal is true.
/// Variables no clause mentions are dropped and the rest relabeled.
pub fn pcp_from_1in3<S: Scalar>(f: &OneInThreeFormula) -> Result<PcpFromFormula<S>> {
    f.validate()?;
    let mut used = vec![false; f.variables];
    for c in &f.clauses {
        for l in c {
            used[l.var] = true;
        }
    }
    let variables: Vec<usize> = (0..f.variables).filter(|&v| used[v]).collect();
    let mut position = vec![usize::MAX; f.variables];
    for (p, &v) in variables.iter().enumerate() {
        position[v] = p;
    }
    let weight = S::from_ratio(1, f.clauses.len() as i64);
    let checks = f
        .clauses
        .iter()
        .map(|c| {
            let mut lits = *c;
            lits.sort_by_key(|l| l.var);
            let triple = lits.map(|l| position[l.var]);
            let accepts = move |a: usize, b: usize, d: usize| {
                [a, b, d].iter().zip(&lits).filter(|(v, l)| l.eval(**v)).count() == 1
            };
            (triple, weight.clone(), accepts)
        })
        .collect();
    let game = PcpGame::from_checks(variables.len(), 2, checks)?;
    Ok(PcpFromFormula { game, variables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_pcp, PcpProofDistribution};
    use crate::scalar::Rational;

    fn lit(v: i64) -> Literal {
        Literal { var: v.unsigned_abs() as usize - 1, positive: v > 0 }
    }

    fn formula(n: usize, clauses: &[[i64; 3]]) -> OneInThreeFormula {
        OneInThreeFormula { variables: n, clauses: clauses.iter().map(|c| c.map(lit)).collect() }
    }

    #[test]
    fn single_positive_clause() {
        let p = pcp_from_1in3::<Rational>(&formula(3, &[[1, 2, 3]])).unwrap();
        let proof = PcpProofDistribution::point_mass(2, vec![1, 0, 0]).unwrap();
        assert_eq!(eval_pcp(&p.game, &proof).unwrap(), Rational::from_ratio(1, 1));
    }

    #[test]
    fn unsorted_clause_reads_sorted_positions() {
        let p = pcp_from_1in3::<Rational>(&formula(3, &[[3, -1, 2]])).unwrap();
        assert_eq!(p.game.triple(0), [0, 1, 2]);
        // x1 = 1 makes -x1 false; x2 = 1 true; x3 = 0 false: exactly one.
        assert!(p.game.accepts(0, [1, 1, 0]));
        assert!(!p.game.accepts(0, [0, 1, 0]));
    }

    #[test]
    fn unused_variables_dropped() {
        let p = pcp_from_1in3::<Rational>(&formula(5, &[[1, 3, 5]])).unwrap();
        assert_eq!(p.variables, vec![0, 2, 4]);
        assert_eq!(p.game.positions(), 3);
    }

    #[test]
    fn bad_formulas_rejected() {
        assert!(pcp_from_1in3::<Rational>(&formula(3, &[])).is_err());
        assert!(pcp_from_1in3::<Rational>(&formula(3, &[[1, -1, 2]])).is_err());
        assert!(pcp_from_1in3::<Rational>(&formula(2, &[[1, 2, 3]])).is_err());
    }
}
