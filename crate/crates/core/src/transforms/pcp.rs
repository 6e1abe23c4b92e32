use super::Tests;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{AggregatedTriple, DeterministicBipartiteStrategy, PcpGame, TwoProverGame};
use crate::scalar::Scalar;

fn check_proof(proof: &[usize], positions: usize, alphabet: usize) -> Result<()> {
    if proof.len() != positions {
        return Err(Error::dims(format!("proof has length {}, expected {positions}", proof.len())));
    }
    if proof.iter().any(|&a| a >= alphabet) {
        return Err(Error::invalid("proof letter outside the alphabet"));
    }
    Ok(())
}

fn triple_code(answers: [usize; 3], alphabet: usize) -> usize {
    (answers[0] * alphabet + answers[1]) * alphabet + answers[2]
}

fn triple_letters(code: usize, alphabet: usize) -> [usize; 3] {
    [code / (alphabet * alphabet), (code / alphabet) % alphabet, code % alphabet]
}

/// The oracularized PCP game: prover 1 gets a triple, prover 2 one of its
/// positions.
#[derive(Clone, Debug, PartialEq)]
pub struct OracularizedPcp<S> {
    pub game: TwoProverGame<S>,
    pub positions: usize,
    pub alphabet: usize,
    /// Prover-1 question index to triple.
    pub triples: Vec<[usize; 3]>,
    /// Prover-2 question index to original position.
    pub queried: Vec<usize>,
}

impl<S: Scalar> OracularizedPcp<S> {
    /// Both provers read their answers from `proof`.
    pub fn honest_strategy(&self, proof: &[usize]) -> Result<DeterministicBipartiteStrategy> {
        check_proof(proof, self.positions, self.alphabet)?;
        let f1 = self.triples.iter().map(|t| triple_code([proof[t[0]], proof[t[1]], proof[t[2]]], self.alphabet)).collect();
        let f2 = self.queried.iter().map(|&q| proof[q]).collect();
        Ok(DeterministicBipartiteStrategy::new(f1, f2))
    }
}

pub fn oracularize_pcp<S: Scalar>(g: &PcpGame<S>) -> Result<OracularizedPcp<S>> {
    oracularize_pcp_with(g, Tests::Both)
}

/// `pi'(T, q) = pi(T)/3` for `q` in `T`; accept iff the triple is accepted
/// and prover 2's letter equals prover 1's letter at `q`.
pub fn oracularize_pcp_with<S: Scalar>(g: &PcpGame<S>, tests: Tests) -> Result<OracularizedPcp<S>> {
    let agg = g.aggregated();
    let marginal = g.position_marginal();
    let queried: Vec<usize> = (0..g.positions()).filter(|&q| !marginal[q].is_zero()).collect();
    let a = g.alphabet();
    let a3 = a * a * a;
    let needed = (agg.len() * queried.len()) as u128 * (a3 * a) as u128;
    Limits::from_env().check_table("oracularized PCP predicate", needed)?;

    let third = S::from_ratio(1, 3);
    let slot = |t: &[usize; 3], q: usize| t.iter().position(|&p| p == q);
    let game = TwoProverGame::from_fn(
        [agg.len(), queried.len(), a3, a],
        |i, j| match slot(&agg[i].positions, queried[j]) {
            Some(_) => agg[i].weight.clone() * third.clone(),
            None => S::zero(),
        },
        |i, j, a1, a2| {
            let Some(pos) = slot(&agg[i].positions, queried[j]) else {
                return S::zero();
            };
            if tests.consistency() && triple_letters(a1, a)[pos] != a2 {
                return S::zero();
            }
            if tests.simulation() {
                agg[i].accept[a1].clone()
            } else {
                S::one()
            }
        },
    )?;
    Ok(OracularizedPcp {
        game,
        positions: g.positions(),
        alphabet: a,
        triples: agg.iter().map(|t| t.positions).collect(),
        queried,
    })
}

/// One way the verifier can arrive at a `(triple, pair)` question: the real
/// position is `triple[slot]`, it sits at coordinate `coordinate` (0 or 1) of
/// the sorted pair, and the branch has joint probability `weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct DummyBranch<S> {
    pub slot: usize,
    pub coordinate: usize,
    pub weight: S,
}

/// The oracularized PCP game with a dummy question: prover 2 gets the real
/// position together with an independent one, as a sorted pair.
#[derive(Clone, Debug, PartialEq)]
pub struct OracularizedPcpDummy<S> {
    pub game: TwoProverGame<S>,
    pub positions: usize,
    pub alphabet: usize,
    pub triples: Vec<[usize; 3]>,
    /// Aggregated acceptance per triple, aligned with `triples`.
    pub accept: Vec<AggregatedTriple<S>>,
    /// Prover-2 question index to sorted pair of original positions.
    pub pairs: Vec<(usize, usize)>,
    /// The `pi(q)` position marginal of the base game.
    pub marginal: Vec<S>,
}

impl<S: Scalar> OracularizedPcpDummy<S> {
    pub fn pair_index(&self, p: usize, q: usize) -> Option<usize> {
        let key = if p <= q { (p, q) } else { (q, p) };
        self.pairs.binary_search(&key).ok()
    }

    /// Hidden verifier branches behind prover questions `(i1, i2)`. Their
    /// weights sum to `pi'(i1, i2)`.
    pub fn branches(&self, i1: usize, i2: usize) -> Vec<DummyBranch<S>> {
        dummy_branches(&self.accept[i1], self.pairs[i2], &self.marginal)
    }

    /// Prover 1 reads the triple from `proof`; prover 2 reads both positions.
    pub fn honest_strategy(&self, proof: &[usize]) -> Result<DeterministicBipartiteStrategy> {
        check_proof(proof, self.positions, self.alphabet)?;
        let f1 = self.triples.iter().map(|t| triple_code([proof[t[0]], proof[t[1]], proof[t[2]]], self.alphabet)).collect();
        let f2 = self.pairs.iter().map(|&(p, q)| proof[p] * self.alphabet + proof[q]).collect();
        Ok(DeterministicBipartiteStrategy::new(f1, f2))
    }
}

fn dummy_branches<S: Scalar>(t: &AggregatedTriple<S>, pair: (usize, usize), marginal: &[S]) -> Vec<DummyBranch<S>> {
    let third = S::from_ratio(1, 3);
    let half = S::from_ratio(1, 2);
    let (p1, p2) = pair;
    let mut out = Vec::new();
    for (slot, &q) in t.positions.iter().enumerate() {
        let base = t.weight.clone() * third.clone();
        if p1 == p2 {
            if q == p1 {
                let w = base * marginal[q].clone() * half.clone();
                out.push(DummyBranch { slot, coordinate: 0, weight: w.clone() });
                out.push(DummyBranch { slot, coordinate: 1, weight: w });
            }
        } else if q == p1 {
            out.push(DummyBranch { slot, coordinate: 0, weight: base * marginal[p2].clone() });
        } else if q == p2 {
            out.push(DummyBranch { slot, coordinate: 1, weight: base * marginal[p1].clone() });
        }
    }
    out.retain(|b| !b.weight.is_zero());
    out
}

pub fn oracularize_pcp_dummy<S: Scalar>(g: &PcpGame<S>) -> Result<OracularizedPcpDummy<S>> {
    oracularize_pcp_dummy_with(g, Tests::Both)
}

/// The verifier draws `T ~ pi` and a uniform slot of `T` for the real
/// position `q`, and `q~` from the position marginal for the dummy. Prover 2
/// sees the sorted pair; the real coordinate (a fair coin when `q = q~`) is
/// integrated into `pi'` and into the acceptance probability.
pub fn oracularize_pcp_dummy_with<S: Scalar>(g: &PcpGame<S>, tests: Tests) -> Result<OracularizedPcpDummy<S>> {
    let agg = g.aggregated();
    let marginal = g.position_marginal();
    let queried: Vec<usize> = (0..g.positions()).filter(|&q| !marginal[q].is_zero()).collect();
    let mut pairs = Vec::new();
    for (i, &p) in queried.iter().enumerate() {
        for &q in &queried[i..] {
            if agg.iter().any(|t| !dummy_branches(t, (p, q), &marginal).is_empty()) {
                pairs.push((p, q));
            }
        }
    }
    let a = g.alphabet();
    let a3 = a * a * a;
    let needed = (agg.len() * pairs.len()) as u128 * (a3 * a * a) as u128;
    Limits::from_env().check_table("dummy-oracularized predicate", needed)?;

    let branches: Vec<Vec<Vec<DummyBranch<S>>>> =
        agg.iter().map(|t| pairs.iter().map(|&pair| dummy_branches(t, pair, &marginal)).collect()).collect();
    let totals: Vec<Vec<S>> =
        branches.iter().map(|row| row.iter().map(|bs| bs.iter().map(|b| b.weight.clone()).sum()).collect()).collect();

    let game = TwoProverGame::from_fn(
        [agg.len(), pairs.len(), a3, a * a],
        |i, j| totals[i][j].clone(),
        |i, j, a1, a2| {
            let bs = &branches[i][j];
            if bs.is_empty() {
                return S::zero();
            }
            let letters = triple_letters(a1, a);
            let pair_letters = [a2 / a, a2 % a];
            let consistent: S = if tests.consistency() {
                let agree: S = bs
                    .iter()
                    .filter(|b| pair_letters[b.coordinate] == letters[b.slot])
                    .map(|b| b.weight.clone())
                    .sum();
                agree / totals[i][j].clone()
            } else {
                S::one()
            };
            if consistent.is_zero() {
                return S::zero();
            }
            if tests.simulation() {
                agg[i].accept[a1].clone() * consistent
            } else {
                consistent
            }
        },
    )?;
    Ok(OracularizedPcpDummy {
        game,
        positions: g.positions(),
        alphabet: a,
        triples: agg.iter().map(|t| t.positions).collect(),
        accept: agg,
        pairs,
        marginal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn exactly_one(a: usize, b: usize, c: usize) -> bool {
        a + b + c == 1
    }

    fn two_clause_game() -> PcpGame<Rational> {
        PcpGame::from_checks(4, 2, vec![([0, 1, 2], r(1, 2), exactly_one), ([1, 2, 3], r(1, 2), exactly_one)]).unwrap()
    }

    #[test]
    fn single_triple_shapes() {
        let g = PcpGame::from_checks(3, 2, vec![([0, 1, 2], r(1, 1), exactly_one)]).unwrap();
        let o = oracularize_pcp(&g).unwrap();
        assert_eq!(o.game.q1_count(), 1);
        assert_eq!(o.game.q2_count(), 3);
        assert!(o.game.validate().is_valid());
        let d = oracularize_pcp_dummy(&g).unwrap();
        assert_eq!(d.pairs.len(), 6);
        assert!(d.game.validate().is_valid());
    }

    #[test]
    fn honest_satisfying_proof_wins_both() {
        let g = two_clause_game();
        let proof = [0, 1, 0, 0];
        let o = oracularize_pcp(&g).unwrap();
        assert_eq!(o.honest_strategy(&proof).unwrap().evaluate(&o.game).unwrap(), r(1, 1));
        let d = oracularize_pcp_dummy(&g).unwrap();
        assert_eq!(d.honest_strategy(&proof).unwrap().evaluate(&d.game).unwrap(), r(1, 1));
    }

    #[test]
    fn dummy_real_position_marginal() {
        // Oracle: sum the hidden branch weights by real position.
        let g = two_clause_game();
        let d = oracularize_pcp_dummy(&g).unwrap();
        let mut by_real = vec![r(0, 1); 4];
        for i in 0..d.triples.len() {
            for j in 0..d.pairs.len() {
                for b in d.branches(i, j) {
                    by_real[d.triples[i][b.slot]] += b.weight;
                }
            }
        }
        assert_eq!(by_real, vec![r(1, 6), r(1, 3), r(1, 3), r(1, 6)]);
        assert_eq!(by_real, g.position_marginal());
    }

    #[test]
    fn consistency_only_is_always_passed_by_honest_provers() {
        let g = two_clause_game();
        for bits in 0..16usize {
            let proof: Vec<usize> = (0..4).map(|i| (bits >> i) & 1).collect();
            let o = oracularize_pcp_with(&g, Tests::ConsistencyOnly).unwrap();
            assert_eq!(o.honest_strategy(&proof).unwrap().evaluate(&o.game).unwrap(), r(1, 1));
            let d = oracularize_pcp_dummy_with(&g, Tests::ConsistencyOnly).unwrap();
            assert_eq!(d.honest_strategy(&proof).unwrap().evaluate(&d.game).unwrap(), r(1, 1));
        }
    }
}
