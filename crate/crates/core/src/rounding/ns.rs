use crate::error::{Error, Result};
use crate::model::{eval_two_prover, index, BipartiteStrategy, MultiRoundGame, MultiRoundStrategy};
use crate::scalar::{statistical_difference, Scalar};
use crate::transforms::OracularizedMultiRound;

use super::InequalityReport;

/// Marginals of a no-signaling strategy for an oracularized multi-round
/// game, with its per-question failure probabilities. First-prover
/// questions are the support tuples of the base game, in `q1_tuples` order.
#[derive(Clone, Debug, PartialEq)]
pub struct NsMarginalTables<S> {
    pub q_count: usize,
    pub a_count: usize,
    pub rounds: usize,
    pub q1_tuples: Vec<usize>,
    /// `pi(q)` per first-prover question.
    pub pi: Vec<S>,
    /// `alpha_q` over `A^r`.
    pub alpha: Vec<Vec<S>>,
    /// `alpha_{q,k}` over `A^k`, indexed `[q][k-1]`.
    pub alpha_prefix: Vec<Vec<Vec<S>>>,
    /// Second-prover questions `(k, encoded prefix)`, sorted.
    pub prefixes: Vec<(usize, usize)>,
    /// `beta` over `A^k`, aligned with `prefixes`.
    pub beta: Vec<Vec<S>>,
    /// `eps_cons(q, k)`, indexed `[q][k-1]`.
    pub eps_cons_qk: Vec<Vec<S>>,
    pub eps_cons_q: Vec<S>,
    pub eps_cons: S,
    pub eps_sim: S,
    pub eps: S,
    /// `eps(k)`: failure probability given a length-`k` second question.
    pub eps_k: Vec<S>,
}

impl<S: Scalar> NsMarginalTables<S> {
    pub fn beta(&self, k: usize, prefix: usize) -> Option<&[S]> {
        self.prefixes.binary_search(&(k, prefix)).ok().map(|i| self.beta[i].as_slice())
    }

    fn beta_of_tuple(&self, qi: usize, k: usize) -> &[S] {
        let p = index::prefix(self.q1_tuples[qi], self.q_count, self.rounds, k);
        self.beta(k, p).expect("prefixes of support tuples are second-prover questions")
    }
}

/// Moves second-prover mass on answers of the wrong length to the all-zero
/// answer of the right length. The map is local to prover 2, so the result
/// stays no-signaling and wins at least as often.
pub fn canonicalize_prefix_answers<S: Scalar>(
    o: &OracularizedMultiRound<S>,
    theta: &BipartiteStrategy<S>,
) -> Result<BipartiteStrategy<S>> {
    check_counts(o, theta)?;
    let [_, _, a1c, a2c] = theta.counts();
    let mut table = theta.table().to_vec();
    for (i2, &(k, _)) in o.q2_prefixes.iter().enumerate() {
        let target = o.answers2.index(k, 0);
        for i1 in 0..o.q1_tuples.len() {
            for a1 in 0..a1c {
                let row = ((i1 * o.q2_prefixes.len() + i2) * a1c + a1) * a2c;
                for a2 in 0..a2c {
                    if o.answers2.split(a2).0 != k {
                        let moved = std::mem::replace(&mut table[row + a2], S::zero());
                        table[row + target] = table[row + target].clone() + moved;
                    }
                }
            }
        }
    }
    BipartiteStrategy::new(theta.counts(), table)
}

fn check_counts<S: Scalar>(o: &OracularizedMultiRound<S>, theta: &BipartiteStrategy<S>) -> Result<()> {
    if theta.counts() != o.game.counts() {
        return Err(Error::dims(format!(
            "strategy counts {:?} do not match the oracularized game {:?}",
            theta.counts(),
            o.game.counts()
        )));
    }
    Ok(())
}

/// Computes `alpha`, `beta` and the failure probabilities of `theta` in the
/// oracularized game `o` of `g`.
///
/// `theta` must be no-signaling (exactly, in rational mode) and its second
/// prover must answer prefix questions of length `k` inside `A^k`; see
/// [`canonicalize_prefix_answers`].
pub fn ns_decompose<S: Scalar>(
    g: &MultiRoundGame<S>,
    o: &OracularizedMultiRound<S>,
    theta: &BipartiteStrategy<S>,
) -> Result<NsMarginalTables<S>> {
    check_counts(o, theta)?;
    if (g.q_count(), g.a_count(), g.rounds()) != (o.q_count, o.a_count, o.rounds) {
        return Err(Error::dims("base game does not match the oracularized game"));
    }
    let ns = theta.is_no_signaling(&S::tolerance());
    if !ns.no_signaling {
        return Err(Error::Signaling { violation: ns.max_violation.to_text() });
    }
    let (qc, ac, r) = (o.q_count, o.a_count, o.rounds);
    let [n1, _, a1c, a2c] = theta.counts();
    let tol = S::tolerance();

    for (i2, &(k, p)) in o.q2_prefixes.iter().enumerate() {
        for (i1, &q) in o.q1_tuples.iter().enumerate() {
            if index::prefix(q, qc, r, k) != p {
                continue;
            }
            let row = theta.row(i1, i2);
            for a2 in (0..a2c).filter(|&a2| o.answers2.split(a2).0 != k) {
                for a1 in 0..a1c {
                    if row[a1 * a2c + a2].abs() > tol {
                        return Err(Error::invalid(format!(
                            "second prover answers outside A^{k} on a length-{k} question; canonicalize first"
                        )));
                    }
                }
            }
        }
    }

    let pi: Vec<S> = o.q1_tuples.iter().map(|&q| g.pi(q).clone()).collect();
    let full_index = |q: usize| o.q2_index(r, q).expect("full tuples are second-prover questions");

    let alpha: Vec<Vec<S>> = (0..n1).map(|i1| theta.marginal1(i1, full_index(o.q1_tuples[i1]))).collect();
    let alpha_prefix: Vec<Vec<Vec<S>>> = alpha
        .iter()
        .map(|dist| {
            (1..=r)
                .map(|k| {
                    let mut out = vec![S::zero(); index::pow(ac, k)];
                    for (a, p) in dist.iter().enumerate() {
                        let slot = &mut out[index::prefix(a, ac, r, k)];
                        *slot = slot.clone() + p.clone();
                    }
                    out
                })
                .collect()
        })
        .collect();

    let mut beta = Vec::with_capacity(o.q2_prefixes.len());
    for (i2, &(k, p)) in o.q2_prefixes.iter().enumerate() {
        let mut reference: Option<Vec<S>> = None;
        for (i1, &q) in o.q1_tuples.iter().enumerate() {
            if index::prefix(q, qc, r, k) != p {
                continue;
            }
            let m2 = theta.marginal2(i1, i2);
            let b: Vec<S> = (0..index::pow(ac, k)).map(|code| m2[o.answers2.index(k, code)].clone()).collect();
            match &reference {
                None => reference = Some(b),
                Some(first) => {
                    if first.iter().zip(&b).any(|(x, y)| !x.approx_eq(y)) {
                        return Err(Error::Signaling {
                            violation: format!("beta for prefix ({k}, {p}) depends on the question suffix"),
                        });
                    }
                }
            }
        }
        beta.push(reference.expect("every prefix question extends a support tuple"));
    }

    let mut eps_cons_qk = Vec::with_capacity(n1);
    let mut eps_k = vec![S::zero(); r];
    for (i1, &q) in o.q1_tuples.iter().enumerate() {
        let mut per_k = Vec::with_capacity(r);
        for k in 1..=r {
            let i2 = o.q2_index(k, index::prefix(q, qc, r, k)).expect("prefix present");
            let row = theta.row(i1, i2);
            let rrow = o.game.predicate_row(i1, i2);
            let mut mismatch = S::zero();
            let mut win = S::zero();
            for a1 in 0..a1c {
                for a2 in 0..a2c {
                    let p = &row[a1 * a2c + a2];
                    if p.is_zero() {
                        continue;
                    }
                    let (k2, code) = o.answers2.split(a2);
                    if k2 == k && index::prefix(a1, ac, r, k) != code {
                        mismatch = mismatch + p.clone();
                    }
                    win = win + p.clone() * rrow[a1 * a2c + a2].clone();
                }
            }
            per_k.push(mismatch);
            eps_k[k - 1] = eps_k[k - 1].clone() + pi[i1].clone() * (S::one() - win);
        }
        eps_cons_qk.push(per_k);
    }
    let r_s = S::from_usize(r);
    let eps_cons_q: Vec<S> = eps_cons_qk.iter().map(|v| v.iter().cloned().sum::<S>() / r_s.clone()).collect();
    let eps_cons: S = pi.iter().zip(&eps_cons_q).map(|(p, e)| p.clone() * e.clone()).sum();
    let eps_sim: S = o
        .q1_tuples
        .iter()
        .enumerate()
        .map(|(i1, &q)| {
            let lose: S = alpha[i1].iter().enumerate().filter(|&(a, _)| !g.accepts(q, a)).map(|(_, p)| p.clone()).sum();
            pi[i1].clone() * lose
        })
        .sum();
    let eps = S::one() - eval_two_prover(&o.game, theta)?;

    Ok(NsMarginalTables {
        q_count: qc,
        a_count: ac,
        rounds: r,
        q1_tuples: o.q1_tuples.clone(),
        pi,
        alpha,
        alpha_prefix,
        prefixes: o.q2_prefixes.clone(),
        beta,
        eps_cons_qk,
        eps_cons_q,
        eps_cons,
        eps_sim,
        eps,
        eps_k,
    })
}

/// The rounded single-prover strategy: round `k` answers with the
/// conditional of `beta_{q_[1,k]}` given the answers so far, and uniformly
/// when that conditional is undefined (zero mass, or a prefix never asked).
pub fn round_no_signaling<S: Scalar>(t: &NsMarginalTables<S>) -> MultiRoundStrategy<S> {
    let uniform = S::from_ratio(1, t.a_count as i64);
    MultiRoundStrategy::from_fn(t.q_count, t.a_count, t.rounds, |k, qp, ap, ak| {
        let Some(b) = t.beta(k, index::encode(qp, t.q_count)) else {
            return uniform.clone();
        };
        let base = index::encode(ap, t.a_count) * t.a_count;
        let den: S = if k == 1 { S::one() } else { b[base..base + t.a_count].iter().cloned().sum() };
        if den.is_zero() {
            uniform.clone()
        } else {
            b[base + ak].clone() / den
        }
    })
}

/// The hybrids `h<k>`: the second prover's `k`-prefix distribution followed
/// by rounded rounds `k+1..r`. `h<1>` is the rounded strategy itself.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridFamily<S> {
    /// `h[k-1][q][a]` over first-prover questions and `A^r`.
    pub h: Vec<Vec<Vec<S>>>,
    /// Winning probability `p_k` of each hybrid in the base game.
    pub p: Vec<S>,
}

pub fn hybrid_family<S: Scalar>(
    t: &NsMarginalTables<S>,
    rounded: &MultiRoundStrategy<S>,
    g: &MultiRoundGame<S>,
) -> Result<HybridFamily<S>> {
    let (qc, ac, r) = (t.q_count, t.a_count, t.rounds);
    if rounded.rounds() != r || (g.q_count(), g.a_count(), g.rounds()) != (qc, ac, r) {
        return Err(Error::dims("hybrid inputs disagree on shape"));
    }
    let an = index::pow(ac, r);
    let mut h = Vec::with_capacity(r);
    let mut p = Vec::with_capacity(r);
    for k in 1..=r {
        let mut family = Vec::with_capacity(t.q1_tuples.len());
        let mut win = S::zero();
        for (qi, &q) in t.q1_tuples.iter().enumerate() {
            let b = t.beta_of_tuple(qi, k);
            let dist: Vec<S> = (0..an)
                .map(|a| {
                    let mut v = b[index::prefix(a, ac, r, k)].clone();
                    for i in k + 1..=r {
                        if v.is_zero() {
                            break;
                        }
                        let qp = index::prefix(q, qc, r, i);
                        let ap = index::prefix(a, ac, r, i - 1);
                        let ai = index::prefix(a, ac, r, i) % ac;
                        v = v * rounded.conditional(i, qp, ap, ai).clone();
                    }
                    v
                })
                .collect();
            let accepted: S = dist.iter().enumerate().filter(|&(a, _)| g.accepts(q, a)).map(|(_, v)| v.clone()).sum();
            win = win + t.pi[qi].clone() * accepted;
            family.push(dist);
        }
        h.push(family);
        p.push(win);
    }
    Ok(HybridFamily { h, p })
}

/// Every inequality of the no-signaling soundness argument. With `w`
/// (the base game's value) the two value-dependent bounds are added.
pub fn verify_ns_claims<S: Scalar>(t: &NsMarginalTables<S>, hy: &HybridFamily<S>, w: Option<&S>) -> InequalityReport<S> {
    let tol = S::tolerance();
    let r = t.rounds;
    let r_s = S::from_usize(r);
    let mut report = InequalityReport::default();
    report.check("eps-covers-consistency", t.eps_cons.clone(), t.eps.clone(), &tol);
    report.check("eps-covers-simulation", t.eps_sim.clone(), t.eps.clone(), &tol);
    let eps_avg: S = t.eps_k.iter().cloned().sum::<S>() / r_s.clone();
    report.check("eps-round-average", (eps_avg.clone() - t.eps.clone()).abs(), S::zero(), &tol);
    for qi in 0..t.q1_tuples.len() {
        for k in 1..=r {
            let sd = statistical_difference(&t.alpha_prefix[qi][k - 1], t.beta_of_tuple(qi, k));
            report.check(format!("alpha-beta-sd q={qi} k={k}"), sd, t.eps_cons_qk[qi][k - 1].clone(), &tol);
        }
        for k in 2..=r {
            let sd = statistical_difference(&hy.h[k - 2][qi], &hy.h[k - 1][qi]);
            let bound = t.eps_cons_qk[qi][k - 2].clone() + t.eps_cons_qk[qi][k - 1].clone();
            report.check(format!("hybrid-step-sd q={qi} k={k}"), sd, bound, &tol);
        }
    }
    let two_r = S::from_usize(2 * r);
    report.check("hybrid-endpoints", hy.p[r - 1].clone() - hy.p[0].clone(), two_r * t.eps_cons.clone(), &tol);
    report.check("last-hybrid", S::one() - t.eps_k[r - 1].clone(), hy.p[r - 1].clone(), &tol);
    if let Some(w) = w {
        report.check("rounded-value", hy.p[0].clone(), w.clone(), &tol);
        let bound = (S::one() - w.clone()) / (S::from_usize(3) * r_s);
        report.check("soundness", bound, t.eps.clone(), &tol);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eval_multi_round, DeterministicMultiRoundStrategy};
    use num::Zero;
    use crate::scalar::Rational;
    use crate::transforms::{oracularize_multi_round, oracularize_multi_round_with, Tests};
    use crate::values::{multi_round_value, no_signaling_value};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn echo_game() -> MultiRoundGame<Rational> {
        MultiRoundGame::from_fn(2, 2, 2, |_| r(1, 4), |q, a| q == a).unwrap()
    }

    /// Round 2 must repeat the first question; round 1 is free.
    fn adaptive_game() -> MultiRoundGame<Rational> {
        MultiRoundGame::from_fn(2, 2, 2, |_| r(1, 4), |q, a| a[1] == q[0] && a[0] == q[1]).unwrap()
    }

    #[test]
    fn honest_strategy_has_no_slack() {
        let g = echo_game();
        let o = oracularize_multi_round(&g).unwrap();
        let echo = DeterministicMultiRoundStrategy { q_count: 2, a_count: 2, answers: vec![vec![0, 1], vec![0, 1, 0, 1]] };
        let [_, _, a1c, a2c] = o.game.counts();
        let theta = o.honest_strategy(&echo).unwrap().embed::<Rational>(a1c, a2c).unwrap();
        let t = ns_decompose(&g, &o, &theta).unwrap();
        assert!(t.eps.is_zero() && t.eps_cons.is_zero() && t.eps_sim.is_zero());
        let rounded = round_no_signaling(&t);
        assert_eq!(eval_multi_round(&g, &rounded).unwrap(), r(1, 1));
        let hy = hybrid_family(&t, &rounded, &g).unwrap();
        assert_eq!(hy.p, vec![r(1, 1), r(1, 1)]);
        assert_eq!(hy.h[0], hy.h[1]);
        let report = verify_ns_claims(&t, &hy, Some(&r(1, 1)));
        assert!(report.all_hold());
        assert!(report.entries.iter().filter(|e| e.label.contains("sd")).all(|e| e.lhs.is_zero()));
    }

    fn uniform_theta(o: &OracularizedMultiRound<Rational>) -> BipartiteStrategy<Rational> {
        let [n1, n2, a1c, _] = o.game.counts();
        let local1 = vec![vec![r(1, a1c as i64); a1c]; n1];
        let local2: Vec<Vec<Rational>> = o
            .q2_prefixes
            .iter()
            .map(|&(k, _)| {
                let width = 1i64 << k;
                (0..o.answers2.len()).map(|a| if o.answers2.split(a).0 == k { r(1, width) } else { r(0, 1) }).collect()
            })
            .collect();
        assert_eq!(local2.len(), n2);
        BipartiteStrategy::product(&local1, &local2).unwrap()
    }

    #[test]
    fn uniform_answers_match_direct_sums() {
        let g = echo_game();
        let o = oracularize_multi_round(&g).unwrap();
        let t = ns_decompose(&g, &o, &uniform_theta(&o)).unwrap();
        // Independent uniform answers disagree on a k-prefix w.p. 1 - 2^-k.
        for per_k in &t.eps_cons_qk {
            assert_eq!(per_k, &vec![r(1, 2), r(3, 4)]);
        }
        let cons_game = oracularize_multi_round_with(&g, Tests::ConsistencyOnly).unwrap();
        let direct = r(1, 1) - eval_two_prover(&cons_game.game, &uniform_theta(&o)).unwrap();
        assert_eq!(t.eps_cons, direct);
        let sim_game = oracularize_multi_round_with(&g, Tests::SimulationOnly).unwrap();
        assert_eq!(t.eps_sim, r(1, 1) - eval_two_prover(&sim_game.game, &uniform_theta(&o)).unwrap());
        let rounded = round_no_signaling(&t);
        for k in 1..=2 {
            for qp in 0..(1 << k) {
                for ap in 0..(1 << (k - 1)) {
                    assert_eq!(rounded.conditional(k, qp, ap, 0), &r(1, 2));
                }
            }
        }
        let hy = hybrid_family(&t, &rounded, &g).unwrap();
        assert_eq!(hy.p[0], eval_multi_round(&g, &rounded).unwrap());
        assert!(verify_ns_claims(&t, &hy, Some(&r(1, 1))).all_hold());
    }

    #[test]
    fn lp_optimum_satisfies_every_bound() {
        let g = adaptive_game();
        let w = multi_round_value(&g).unwrap().value;
        assert_eq!(w, r(1, 2));
        let o = oracularize_multi_round(&g).unwrap();
        let ns = no_signaling_value(&o.game).unwrap();
        let theta = canonicalize_prefix_answers(&o, &ns.witness).unwrap();
        assert_eq!(eval_two_prover(&o.game, &theta).unwrap(), ns.value);
        let t = ns_decompose(&g, &o, &theta).unwrap();
        assert_eq!(t.eps, r(1, 1) - ns.value.clone());
        let rounded = round_no_signaling(&t);
        assert!(eval_multi_round(&g, &rounded).unwrap() <= w);
        let hy = hybrid_family(&t, &rounded, &g).unwrap();
        let report = verify_ns_claims(&t, &hy, Some(&w));
        assert!(report.all_hold(), "{:?}", report.violations());
    }

    #[test]
    fn signaling_input_rejected() {
        let g = echo_game();
        let o = oracularize_multi_round(&g).unwrap();
        let [n1, n2, a1c, a2c] = o.game.counts();
        // Prover 2 answers with the parity of prover 1's question.
        let theta = BipartiteStrategy::from_fn([n1, n2, a1c, a2c], |i1, i2, a1, a2| {
            let (k, _) = o.q2_prefixes[i2];
            if a1 == 0 && a2 == o.answers2.index(k, i1 % 2) {
                r(1, 1)
            } else {
                r(0, 1)
            }
        });
        assert!(matches!(ns_decompose(&g, &o, &theta), Err(Error::Signaling { .. })));
    }

    #[test]
    fn wrong_length_answers_rejected_then_canonicalized() {
        let g = echo_game();
        let o = oracularize_multi_round(&g).unwrap();
        let [n1, n2, a1c, a2c] = o.game.counts();
        let theta = BipartiteStrategy::from_fn([n1, n2, a1c, a2c], |_, _, a1, a2| if a1 == 0 && a2 == a2c - 1 { r(1, 1) } else { r(0, 1) });
        assert!(matches!(ns_decompose(&g, &o, &theta), Err(Error::Invalid(_))));
        let fixed = canonicalize_prefix_answers(&o, &theta).unwrap();
        let t = ns_decompose(&g, &o, &fixed).unwrap();
        assert!(eval_two_prover(&o.game, &fixed).unwrap() >= eval_two_prover(&o.game, &theta).unwrap());
        assert_eq!(t.beta(1, 0).unwrap(), &[r(1, 1), r(0, 1)]);
    }
}
