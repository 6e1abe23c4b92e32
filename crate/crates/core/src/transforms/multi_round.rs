use super::{PrefixIndex, Tests};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::model::{index, DeterministicBipartiteStrategy, DeterministicMultiRoundStrategy, MultiRoundGame, TwoProverGame};
use crate::scalar::Scalar;

/// The two-prover game obtained from a multi-round game, with the maps back
/// to the original question tuples.
///
/// Prover 1 receives a whole question tuple `q in Q^r` and answers in `A^r`;
/// prover 2 receives a prefix `q_[1,k]` and answers in `union_k A^k`. Question
/// sets hold only tuples of positive probability.
#[derive(Clone, Debug, PartialEq)]
pub struct OracularizedMultiRound<S> {
    pub game: TwoProverGame<S>,
    pub q_count: usize,
    pub a_count: usize,
    pub rounds: usize,
    /// Prover-1 question index to encoded `Q^r` tuple.
    pub q1_tuples: Vec<usize>,
    /// Prover-2 question index to `(k, encoded prefix)`.
    pub q2_prefixes: Vec<(usize, usize)>,
    pub answers2: PrefixIndex,
}

impl<S: Scalar> OracularizedMultiRound<S> {
    /// Prover-2 question index of the length-`k` prefix of a full tuple.
    pub fn q2_index(&self, k: usize, prefix: usize) -> Option<usize> {
        self.q2_prefixes.binary_search(&(k, prefix)).ok()
    }

    /// Honest provers that both follow one deterministic multi-round prover.
    pub fn honest_strategy(&self, prover: &DeterministicMultiRoundStrategy) -> Result<DeterministicBipartiteStrategy> {
        if prover.rounds() != self.rounds || prover.q_count != self.q_count || prover.a_count != self.a_count {
            return Err(Error::dims("multi-round strategy shape does not match"));
        }
        let f1 = self.q1_tuples.iter().map(|&q| index::encode(&prover.answer_tuple(q), self.a_count)).collect();
        let f2 = self
            .q2_prefixes
            .iter()
            .map(|&(k, p)| self.answers2.index(k, index::encode(&prover.answer_prefix(k, p), self.a_count)))
            .collect();
        Ok(DeterministicBipartiteStrategy::new(f1, f2))
    }
}

pub fn oracularize_multi_round<S: Scalar>(g: &MultiRoundGame<S>) -> Result<OracularizedMultiRound<S>> {
    oracularize_multi_round_with(g, Tests::Both)
}

/// Builds `pi'(q, q_[1,k]) = pi(q) / r` and the predicate
/// `R' = Simulation and Consistency` (or just one of them).
pub fn oracularize_multi_round_with<S: Scalar>(g: &MultiRoundGame<S>, tests: Tests) -> Result<OracularizedMultiRound<S>> {
    let (qc, ac, r) = (g.q_count(), g.a_count(), g.rounds());
    let q1_tuples: Vec<usize> = (0..g.question_tuples()).filter(|&q| !g.pi(q).is_zero()).collect();
    let mut q2_prefixes: Vec<(usize, usize)> = q1_tuples
        .iter()
        .flat_map(|&q| (1..=r).map(move |k| (k, index::prefix(q, qc, r, k))))
        .collect();
    q2_prefixes.sort_unstable();
    q2_prefixes.dedup();
    let answers2 = PrefixIndex::new(ac, r);
    let a1c = index::pow(ac, r);
    let a2c = answers2.len();
    let needed = (q1_tuples.len() as u128)
        .saturating_mul(q2_prefixes.len() as u128)
        .saturating_mul(a1c as u128)
        .saturating_mul(a2c as u128);
    Limits::from_env().check_table("oracularized predicate", needed.max(checked_pow(ac, r)))?;

    let r_inv = S::one() / S::from_usize(r);
    let counts = [q1_tuples.len(), q2_prefixes.len(), a1c, a2c];
    let game = TwoProverGame::from_fn(
        counts,
        |i1, i2| {
            let q = q1_tuples[i1];
            let (k, p) = q2_prefixes[i2];
            if index::prefix(q, qc, r, k) == p {
                g.pi(q).clone() * r_inv.clone()
            } else {
                S::zero()
            }
        },
        |i1, i2, a1, a2| {
            let q = q1_tuples[i1];
            let (k, p) = q2_prefixes[i2];
            if index::prefix(q, qc, r, k) != p {
                return S::zero();
            }
            let sim = !tests.simulation() || g.accepts(q, a1);
            let cons = !tests.consistency() || {
                let (k2, code) = answers2.split(a2);
                k2 == k && index::prefix(a1, ac, r, k) == code
            };
            if sim && cons {
                S::one()
            } else {
                S::zero()
            }
        },
    )?;
    Ok(OracularizedMultiRound { game, q_count: qc, a_count: ac, rounds: r, q1_tuples, q2_prefixes, answers2 })
}
