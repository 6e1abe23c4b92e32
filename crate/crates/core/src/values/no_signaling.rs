use num::{One, Zero};

use super::{Method, ValueResult};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lp::{solve_lp_with_limits, LinearProgram, LpSolution, LpStatus, Relation};
use crate::model::{BipartiteStrategy, TwoProverGame};
use crate::scalar::{Rational, Scalar};

/// The no-signaling LP of a game and the meaning of its variables.
///
/// Variables are `theta(a1, a2 | q1, q2)` for each support pair, followed by
/// the marginals `m1(a1 | q1)` and `m2(a2 | q2)` for the questions that
/// occur in the support. Constraints tie every support pair's marginals to
/// `m1` and `m2` and normalize `m1` and `m2`.
#[derive(Clone, Debug)]
pub struct NoSignalingLp {
    pub lp: LinearProgram,
    pub support: Vec<(usize, usize)>,
    /// LP offset of `m1(. | q1)`, if `q1` occurs in the support.
    pub m1_offset: Vec<Option<usize>>,
    pub m2_offset: Vec<Option<usize>>,
}

pub fn no_signaling_lp(g: &TwoProverGame<Rational>) -> Result<NoSignalingLp> {
    let [q1c, q2c, a1c, a2c] = g.counts();
    let support = g.support();
    let block = a1c * a2c;
    let mut next = support.len() * block;
    let mut m1_offset = vec![None; q1c];
    let mut m2_offset = vec![None; q2c];
    for &(q1, _) in &support {
        if m1_offset[q1].is_none() {
            m1_offset[q1] = Some(next);
            next += a1c;
        }
    }
    for &(_, q2) in &support {
        if m2_offset[q2].is_none() {
            m2_offset[q2] = Some(next);
            next += a2c;
        }
    }
    let mut objective = vec![Rational::zero(); next];
    for (s, &(q1, q2)) in support.iter().enumerate() {
        for (k, w) in g.predicate_row(q1, q2).iter().enumerate() {
            objective[s * block + k] = g.pi(q1, q2) * w;
        }
    }
    let mut lp = LinearProgram::maximize(objective);
    let one = Rational::one;
    for (s, &(q1, q2)) in support.iter().enumerate() {
        let m1 = m1_offset[q1].expect("support question");
        let m2 = m2_offset[q2].expect("support question");
        for a1 in 0..a1c {
            let mut terms: Vec<(usize, Rational)> = (0..a2c).map(|a2| (s * block + a1 * a2c + a2, one())).collect();
            terms.push((m1 + a1, -one()));
            lp.add_sparse(&terms, Relation::Eq, Rational::zero())?;
        }
        for a2 in 0..a2c {
            let mut terms: Vec<(usize, Rational)> = (0..a1c).map(|a1| (s * block + a1 * a2c + a2, one())).collect();
            terms.push((m2 + a2, -one()));
            lp.add_sparse(&terms, Relation::Eq, Rational::zero())?;
        }
    }
    for (offset, count) in m1_offset.iter().flatten().map(|&o| (o, a1c)).chain(m2_offset.iter().flatten().map(|&o| (o, a2c))) {
        let terms: Vec<(usize, Rational)> = (0..count).map(|a| (offset + a, one())).collect();
        lp.add_sparse(&terms, Relation::Eq, one())?;
    }
    Ok(NoSignalingLp { lp, support, m1_offset, m2_offset })
}

impl NoSignalingLp {
    /// The full strategy table for an LP point. Pairs outside the support
    /// get the product of the marginals; questions outside the support get
    /// uniform marginals.
    pub fn strategy(&self, g: &TwoProverGame<Rational>, point: &[Rational]) -> Result<BipartiteStrategy<Rational>> {
        let [q1c, q2c, a1c, a2c] = g.counts();
        let block = a1c * a2c;
        let marginal = |offset: Option<usize>, count: usize| -> Vec<Rational> {
            match offset {
                Some(o) => point[o..o + count].to_vec(),
                None => vec![Rational::from_ratio(1, count as i64); count],
            }
        };
        let m1: Vec<Vec<Rational>> = (0..q1c).map(|q| marginal(self.m1_offset[q], a1c)).collect();
        let m2: Vec<Vec<Rational>> = (0..q2c).map(|q| marginal(self.m2_offset[q], a2c)).collect();
        let mut table = Vec::with_capacity(q1c * q2c * block);
        let mut s = 0;
        for q1 in 0..q1c {
            for q2 in 0..q2c {
                if self.support.get(s) == Some(&(q1, q2)) {
                    table.extend_from_slice(&point[s * block..(s + 1) * block]);
                    s += 1;
                } else {
                    for a1 in 0..a1c {
                        for a2 in 0..a2c {
                            table.push(&m1[q1][a1] * &m2[q2][a2]);
                        }
                    }
                }
            }
        }
        BipartiteStrategy::new(g.counts(), table)
    }
}

/// Exact `w_ns(G)` by linear programming, with an optimal no-signaling
/// strategy as witness.
pub fn no_signaling_value(g: &TwoProverGame<Rational>) -> Result<ValueResult<Rational, BipartiteStrategy<Rational>>> {
    no_signaling_value_with_limits(g, &Limits::from_env()).map(|(v, _)| v)
}

pub(crate) fn no_signaling_value_with_limits(
    g: &TwoProverGame<Rational>,
    limits: &Limits,
) -> Result<(ValueResult<Rational, BipartiteStrategy<Rational>>, LpSolution)> {
    let ns = no_signaling_lp(g)?;
    let solution = solve_lp_with_limits(&ns.lp, limits)?;
    if solution.status != LpStatus::Optimal {
        return Err(Error::invalid(format!("no-signaling LP reported {:?}", solution.status)));
    }
    let witness = ns.strategy(g, &solution.point)?;
    let value = solution.value.clone().expect("optimal");
    Ok((ValueResult { value, witness, method: Method::NoSignalingLp, exact: true }, solution))
}
