use super::index;
use super::validate::{check_distribution, ValidationReport, ViolationKind};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::scalar::Scalar;

/// A nonadaptive-query single-prover `r`-round game `(Q, A, R, pi)`.
///
/// Question tuples `q in Q^r` are encoded big-endian with `q_1` most
/// significant; answers likewise. `pi` has `|Q|^r` entries and the predicate
/// `|Q|^r * |A|^r`, indexed `q_index * |A|^r + a_index`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiRoundGame<S> {
    q_count: usize,
    a_count: usize,
    rounds: usize,
    pi: Vec<S>,
    predicate: Vec<u8>,
}

impl<S: Scalar> MultiRoundGame<S> {
    pub fn new(q_count: usize, a_count: usize, rounds: usize, pi: Vec<S>, predicate: Vec<u8>) -> Result<Self> {
        Self::new_with_limits(q_count, a_count, rounds, pi, predicate, &Limits::from_env())
    }

    pub fn new_with_limits(
        q_count: usize,
        a_count: usize,
        rounds: usize,
        pi: Vec<S>,
        predicate: Vec<u8>,
        limits: &Limits,
    ) -> Result<Self> {
        if q_count == 0 || a_count == 0 || rounds == 0 {
            return Err(Error::invalid("multi-round game needs positive |Q|, |A| and r"));
        }
        let entries = checked_pow(q_count, rounds).saturating_mul(checked_pow(a_count, rounds));
        limits.check_table("multi-round predicate", entries)?;
        let qn = index::pow(q_count, rounds);
        let an = index::pow(a_count, rounds);
        if pi.len() != qn {
            return Err(Error::dims(format!("pi has {} entries, expected {qn}", pi.len())));
        }
        if predicate.len() != qn * an {
            return Err(Error::dims(format!("predicate has {} entries, expected {}", predicate.len(), qn * an)));
        }
        Ok(MultiRoundGame { q_count, a_count, rounds, pi, predicate })
    }

    /// Builds from closures over question and answer tuples.
    pub fn from_fn(
        q_count: usize,
        a_count: usize,
        rounds: usize,
        mut pi: impl FnMut(&[usize]) -> S,
        mut accepts: impl FnMut(&[usize], &[usize]) -> bool,
    ) -> Result<Self> {
        let limits = Limits::from_env();
        let entries = checked_pow(q_count, rounds).saturating_mul(checked_pow(a_count, rounds));
        limits.check_table("multi-round predicate", entries)?;
        let qn = index::pow(q_count, rounds);
        let an = index::pow(a_count, rounds);
        let mut pi_table = Vec::with_capacity(qn);
        let mut pred = Vec::with_capacity(qn * an);
        for qi in 0..qn {
            let q = index::decode(qi, q_count, rounds);
            pi_table.push(pi(&q));
            for ai in 0..an {
                let a = index::decode(ai, a_count, rounds);
                pred.push(accepts(&q, &a) as u8);
            }
        }
        Self::new_with_limits(q_count, a_count, rounds, pi_table, pred, &limits)
    }

    pub fn q_count(&self) -> usize {
        self.q_count
    }
    pub fn a_count(&self) -> usize {
        self.a_count
    }
    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn question_tuples(&self) -> usize {
        self.pi.len()
    }

    pub fn answer_tuples(&self) -> usize {
        index::pow(self.a_count, self.rounds)
    }

    pub fn pi(&self, q_index: usize) -> &S {
        &self.pi[q_index]
    }

    pub fn pi_table(&self) -> &[S] {
        &self.pi
    }

    pub fn predicate_table(&self) -> &[u8] {
        &self.predicate
    }

    pub fn accepts(&self, q_index: usize, a_index: usize) -> bool {
        self.predicate[q_index * self.answer_tuples() + a_index] == 1
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        check_distribution(&mut report, "pi", &self.pi, 1e-12);
        if let Some(bad) = self.predicate.iter().find(|&&v| v > 1) {
            report.push(ViolationKind::PredicateRange, format!("predicate entry {bad} is not 0 or 1"));
        }
        report
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultiRoundGame<T> {
        MultiRoundGame {
            q_count: self.q_count,
            a_count: self.a_count,
            rounds: self.rounds,
            pi: self.pi.iter().map(f).collect(),
            predicate: self.predicate.clone(),
        }
    }
}

/// A randomized prover: per round `k`, the conditional
/// `theta^(k)(a_k | q_[1,k], a_[1,k-1])`.
///
/// Round `k` (0-based `k-1`) is a dense table indexed
/// `(qprefix * |A|^(k-1) + aprefix) * |A| + a_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiRoundStrategy<S> {
    q_count: usize,
    a_count: usize,
    rounds: Vec<Vec<S>>,
}

impl<S: Scalar> MultiRoundStrategy<S> {
    pub fn new(q_count: usize, a_count: usize, rounds: Vec<Vec<S>>) -> Result<Self> {
        for (k, table) in rounds.iter().enumerate() {
            let expected = index::pow(q_count, k + 1) * index::pow(a_count, k + 1);
            if table.len() != expected {
                return Err(Error::dims(format!(
                    "round {} table has {} entries, expected {expected}",
                    k + 1,
                    table.len()
                )));
            }
        }
        Ok(MultiRoundStrategy { q_count, a_count, rounds })
    }

    /// Builds from `f(k, q_prefix, a_prefix, a_k)` with 1-based round `k`.
    pub fn from_fn(
        q_count: usize,
        a_count: usize,
        rounds: usize,
        mut f: impl FnMut(usize, &[usize], &[usize], usize) -> S,
    ) -> Self {
        let mut tables = Vec::with_capacity(rounds);
        for k in 1..=rounds {
            let qn = index::pow(q_count, k);
            let an = index::pow(a_count, k - 1);
            let mut table = Vec::with_capacity(qn * an * a_count);
            for qi in 0..qn {
                let q = index::decode(qi, q_count, k);
                for ai in 0..an {
                    let a = index::decode(ai, a_count, k - 1);
                    for ak in 0..a_count {
                        table.push(f(k, &q, &a, ak));
                    }
                }
            }
            tables.push(table);
        }
        MultiRoundStrategy { q_count, a_count, rounds: tables }
    }

    pub fn uniform(q_count: usize, a_count: usize, rounds: usize) -> Self {
        let p = S::from_ratio(1, a_count as i64);
        Self::from_fn(q_count, a_count, rounds, |_, _, _, _| p.clone())
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    /// `theta^(k)(a_k | q_[1,k], a_[1,k-1])` with encoded prefixes, 1-based `k`.
    pub fn conditional(&self, k: usize, q_prefix: usize, a_prefix: usize, a_k: usize) -> &S {
        let an = index::pow(self.a_count, k - 1);
        &self.rounds[k - 1][(q_prefix * an + a_prefix) * self.a_count + a_k]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (k, table) in self.rounds.iter().enumerate() {
            for (i, chunk) in table.chunks(self.a_count).enumerate() {
                let mut local = ValidationReport::default();
                check_distribution(&mut local, &format!("theta^({})[{i}]", k + 1), chunk, 1e-9);
                report.violations.extend(local.violations);
            }
        }
        report
    }

    /// The induced family `theta_q(a) = prod_j theta^(j)(a_j | ...)`,
    /// indexed `a_index` for the encoded question tuple.
    pub fn induced(&self, q_index: usize) -> Vec<S> {
        let r = self.rounds.len();
        let an = index::pow(self.a_count, r);
        (0..an)
            .map(|ai| {
                let mut p = S::one();
                for k in 1..=r {
                    let qp = index::prefix(q_index, self.q_count, r, k);
                    let ap = index::prefix(ai, self.a_count, r, k - 1);
                    let ak = index::prefix(ai, self.a_count, r, k) % self.a_count;
                    let c = self.conditional(k, qp, ap, ak);
                    if c.is_zero() {
                        return S::zero();
                    }
                    p = p * c.clone();
                }
                p
            })
            .collect()
    }
}

/// Answers that depend only on the question prefix: `answers[k-1][qprefix]`.
/// Optimal provers in multi-round games can always be taken of this form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicMultiRoundStrategy {
    pub q_count: usize,
    pub a_count: usize,
    pub answers: Vec<Vec<usize>>,
}

impl DeterministicMultiRoundStrategy {
    pub fn rounds(&self) -> usize {
        self.answers.len()
    }

    /// The answer tuple given to the encoded question tuple, as digits.
    pub fn answer_tuple(&self, q_index: usize) -> Vec<usize> {
        let r = self.rounds();
        (1..=r)
            .map(|k| self.answers[k - 1][index::prefix(q_index, self.q_count, r, k)])
            .collect()
    }

    /// Answers to a length-`k` question prefix given as an encoded index.
    pub fn answer_prefix(&self, k: usize, q_prefix: usize) -> Vec<usize> {
        (1..=k)
            .map(|j| self.answers[j - 1][index::prefix(q_prefix, self.q_count, k, j)])
            .collect()
    }

    pub fn to_strategy<S: Scalar>(&self) -> MultiRoundStrategy<S> {
        MultiRoundStrategy::from_fn(self.q_count, self.a_count, self.rounds(), |k, q, _, ak| {
            let qi = index::encode(q, self.q_count);
            if self.answers[k - 1][qi] == ak {
                S::one()
            } else {
                S::zero()
            }
        })
    }
}

/// The winning probability `sum_q pi(q) sum_a theta(a|q) R(a|q)`.
pub fn eval_multi_round<S: Scalar>(game: &MultiRoundGame<S>, strategy: &MultiRoundStrategy<S>) -> Result<S> {
    if strategy.rounds() != game.rounds()
        || strategy.q_count != game.q_count()
        || strategy.a_count != game.a_count()
    {
        return Err(Error::dims("strategy shape does not match the game"));
    }
    let an = game.answer_tuples();
    let mut total = S::zero();
    for qi in 0..game.question_tuples() {
        let p = game.pi(qi);
        if p.is_zero() {
            continue;
        }
        let dist = strategy.induced(qi);
        let win: S = (0..an).filter(|&ai| game.accepts(qi, ai)).map(|ai| dist[ai].clone()).sum();
        total = total + p.clone() * win;
    }
    Ok(total)
}
