use super::{Method, ValueResult};
use crate::error::Result;
use crate::limits::{checked_pow, Limits};
use crate::model::{index, DeterministicMultiRoundStrategy, MultiRoundGame, PcpGame};
use crate::scalar::Scalar;

/// `w(G)` of a multi-round game by backward induction over conversation
/// prefixes, with unnormalized `pi` weights:
///
/// `U_r(q, a_[1,r-1]) = max_{a_r} pi(q) R(a | q)`,
/// `U_k(q_[1,k], a_[1,k-1]) = max_{a_k} sum_{q_{k+1}} U_{k+1}(...)`,
/// `w = sum_{q_1} U_1(q_1)`.
pub fn multi_round_value<S: Scalar>(g: &MultiRoundGame<S>) -> Result<ValueResult<S, DeterministicMultiRoundStrategy>> {
    let (qc, ac, r) = (g.q_count(), g.a_count(), g.rounds());
    Limits::from_env().check_table("multi-round backward induction", checked_pow(qc, r).saturating_mul(checked_pow(ac, r)))?;
    // choice[k-1][state] for state = qprefix * A^(k-1) + aprefix.
    let mut choice: Vec<Vec<usize>> = vec![Vec::new(); r];
    // Values of the round-(k+1) states, indexed qprefix * A^k + aprefix.
    let mut next: Vec<S> = Vec::new();
    for k in (1..=r).rev() {
        let qn = index::pow(qc, k);
        let apn = index::pow(ac, k - 1);
        let mut values = Vec::with_capacity(qn * apn);
        let mut picks = Vec::with_capacity(qn * apn);
        for qp in 0..qn {
            for ap in 0..apn {
                let mut best: Option<(S, usize)> = None;
                for a in 0..ac {
                    let full_a = ap * ac + a;
                    let v = if k == r {
                        if g.accepts(qp, full_a) {
                            g.pi(qp).clone()
                        } else {
                            S::zero()
                        }
                    } else {
                        let an_next = index::pow(ac, k);
                        (0..qc).map(|q| next[(qp * qc + q) * an_next + full_a].clone()).sum()
                    };
                    if best.as_ref().is_none_or(|(b, _)| v > *b) {
                        best = Some((v, a));
                    }
                }
                let (v, a) = best.expect("nonempty alphabet");
                values.push(v);
                picks.push(a);
            }
        }
        choice[k - 1] = picks;
        next = values;
    }
    // Read the deterministic strategy off the choices along each question path.
    let mut answers: Vec<Vec<usize>> = Vec::with_capacity(r);
    for k in 1..=r {
        let qn = index::pow(qc, k);
        let row = (0..qn)
            .map(|qp| {
                let digits = index::decode(qp, qc, k);
                let mut ap = 0;
                for j in 1..k {
                    let prefix = index::encode(&digits[..j], qc);
                    ap = ap * ac + answers[j - 1][prefix];
                }
                choice[k - 1][qp * index::pow(ac, k - 1) + ap]
            })
            .collect();
        answers.push(row);
    }
    let witness = DeterministicMultiRoundStrategy { q_count: qc, a_count: ac, answers };
    let value: S = (0..g.question_tuples())
        .filter(|&q| g.accepts(q, index::encode(&witness.answer_tuple(q), ac)))
        .map(|q| g.pi(q).clone())
        .sum();
    debug_assert!(value.approx_eq(&next.iter().cloned().sum()));
    Ok(ValueResult { value, witness, method: Method::BackwardInduction, exact: S::MODE == crate::ScalarMode::Rational })
}

/// `w(G)` of a PCP game by enumerating deterministic proofs; the witness is
/// the first best proof in big-endian order.
pub fn pcp_value<S: Scalar>(g: &PcpGame<S>) -> Result<ValueResult<S, Vec<usize>>> {
    Limits::from_env().check_table("proof enumeration", checked_pow(g.alphabet(), g.positions()))?;
    let n = index::pow(g.alphabet(), g.positions());
    let mut best: Option<(S, Vec<usize>)> = None;
    for i in 0..n {
        let proof = index::decode(i, g.alphabet(), g.positions());
        let v = g.eval_proof(&proof)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, proof));
        }
    }
    let (value, witness) = best.expect("at least one proof");
    Ok(ValueResult { value, witness, method: Method::ProofEnumeration, exact: S::MODE == crate::ScalarMode::Rational })
}
