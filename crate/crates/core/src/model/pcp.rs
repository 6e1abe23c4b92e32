use std::collections::BTreeMap;

use super::index;
use super::validate::{check_distribution, ValidationReport, ViolationKind};
use crate::error::{Error, Result};
use crate::limits::{checked_pow, Limits};
use crate::scalar::Scalar;

/// A nonadaptive three-query PCP game.
///
/// The verifier picks check `c` with probability `pi[c]`, reads the proof at
/// the strictly increasing positions `triples[c]`, and accepts iff
/// `predicate[c * |A|^3 + a1 * |A|^2 + a2 * |A| + a3] == 1`. Two checks may
/// share a triple; [`PcpGame::aggregated`] merges them.
#[derive(Clone, Debug, PartialEq)]
pub struct PcpGame<S> {
    positions: usize,
    alphabet: usize,
    triples: Vec<[usize; 3]>,
    pi: Vec<S>,
    predicate: Vec<u8>,
}

/// All checks on one triple merged: total weight and acceptance probability
/// per answer triple.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregatedTriple<S> {
    pub positions: [usize; 3],
    pub weight: S,
    pub accept: Vec<S>,
}

impl<S: Scalar> PcpGame<S> {
    pub fn new(
        positions: usize,
        alphabet: usize,
        triples: Vec<[usize; 3]>,
        pi: Vec<S>,
        predicate: Vec<u8>,
    ) -> Result<Self> {
        if positions == 0 || alphabet == 0 {
            return Err(Error::invalid("PCP game needs positive position count and alphabet"));
        }
        if triples.is_empty() {
            return Err(Error::invalid("PCP game needs at least one check"));
        }
        if pi.len() != triples.len() {
            return Err(Error::dims(format!("pi has {} entries for {} checks", pi.len(), triples.len())));
        }
        let a3 = alphabet * alphabet * alphabet;
        if predicate.len() != triples.len() * a3 {
            return Err(Error::dims(format!(
                "predicate has {} entries, expected {}",
                predicate.len(),
                triples.len() * a3
            )));
        }
        Ok(PcpGame { positions, alphabet, triples, pi, predicate })
    }

    /// Builds from `(triple, weight, accepts(a1, a2, a3))` checks.
    pub fn from_checks<F>(positions: usize, alphabet: usize, checks: Vec<([usize; 3], S, F)>) -> Result<Self>
    where
        F: Fn(usize, usize, usize) -> bool,
    {
        let mut triples = Vec::with_capacity(checks.len());
        let mut pi = Vec::with_capacity(checks.len());
        let mut predicate = Vec::new();
        for (t, w, accepts) in checks {
            triples.push(t);
            pi.push(w);
            for a1 in 0..alphabet {
                for a2 in 0..alphabet {
                    for a3 in 0..alphabet {
                        predicate.push(accepts(a1, a2, a3) as u8);
                    }
                }
            }
        }
        Self::new(positions, alphabet, triples, pi, predicate)
    }

    pub fn positions(&self) -> usize {
        self.positions
    }
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }
    pub fn check_count(&self) -> usize {
        self.triples.len()
    }
    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }
    pub fn triple(&self, check: usize) -> [usize; 3] {
        self.triples[check]
    }
    pub fn pi(&self, check: usize) -> &S {
        &self.pi[check]
    }
    pub fn pi_table(&self) -> &[S] {
        &self.pi
    }
    pub fn predicate_table(&self) -> &[u8] {
        &self.predicate
    }

    /// Acceptance row of one check, indexed `a1 * |A|^2 + a2 * |A| + a3`.
    pub fn accept_row(&self, check: usize) -> &[u8] {
        let a3 = self.alphabet.pow(3);
        &self.predicate[check * a3..(check + 1) * a3]
    }

    pub fn accepts(&self, check: usize, answers: [usize; 3]) -> bool {
        let a = self.alphabet;
        self.accept_row(check)[(answers[0] * a + answers[1]) * a + answers[2]] == 1
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (c, t) in self.triples.iter().enumerate() {
            if t.iter().any(|&p| p >= self.positions) {
                report.push(ViolationKind::OutOfRange, format!("check {c} reads {t:?} outside [0, {})", self.positions));
            }
            if !(t[0] < t[1] && t[1] < t[2]) {
                report.push(ViolationKind::Support, format!("check {c} triple {t:?} is not strictly increasing"));
            }
        }
        check_distribution(&mut report, "pi", &self.pi, 1e-12);
        if let Some(bad) = self.predicate.iter().find(|&&v| v > 1) {
            report.push(ViolationKind::PredicateRange, format!("predicate entry {bad} is not 0 or 1"));
        }
        report
    }

    /// `pi(q) = (1/3) sum_i sum_{T : T_i = q} pi(T)`.
    pub fn position_marginal(&self) -> Vec<S> {
        let third = S::from_ratio(1, 3);
        let mut m = vec![S::zero(); self.positions];
        for (t, w) in self.triples.iter().zip(&self.pi) {
            for &q in t {
                m[q] = m[q].clone() + w.clone() * third.clone();
            }
        }
        m
    }

    /// Distinct triples of positive weight in lexicographic order.
    pub fn aggregated(&self) -> Vec<AggregatedTriple<S>> {
        let a3 = self.alphabet.pow(3);
        let mut merged: BTreeMap<[usize; 3], (S, Vec<S>)> = BTreeMap::new();
        for (c, t) in self.triples.iter().enumerate() {
            let w = &self.pi[c];
            if w.is_zero() {
                continue;
            }
            let entry = merged.entry(*t).or_insert_with(|| (S::zero(), vec![S::zero(); a3]));
            entry.0 = entry.0.clone() + w.clone();
            for (acc, &bit) in entry.1.iter_mut().zip(self.accept_row(c)) {
                if bit == 1 {
                    *acc = acc.clone() + w.clone();
                }
            }
        }
        merged
            .into_iter()
            .map(|(positions, (weight, mass))| {
                let accept = mass.into_iter().map(|m| m / weight.clone()).collect();
                AggregatedTriple { positions, weight, accept }
            })
            .collect()
    }

    /// Winning probability of a single deterministic proof.
    pub fn eval_proof(&self, proof: &[usize]) -> Result<S> {
        if proof.len() != self.positions {
            return Err(Error::dims(format!("proof has length {}, expected {}", proof.len(), self.positions)));
        }
        Ok(self
            .triples
            .iter()
            .enumerate()
            .filter(|(c, t)| self.accepts(*c, [proof[t[0]], proof[t[1]], proof[t[2]]]))
            .map(|(c, _)| self.pi[c].clone())
            .sum())
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PcpGame<T> {
        PcpGame {
            positions: self.positions,
            alphabet: self.alphabet,
            triples: self.triples.clone(),
            pi: self.pi.iter().map(f).collect(),
            predicate: self.predicate.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr<S> {
    Dense(Vec<S>),
    Mixture(Vec<(S, Vec<usize>)>),
}

/// A distribution over proofs `Pi in A^Q`.
///
/// Dense tables index proofs big-endian with position 0 most significant. The
/// mixture form holds weighted deterministic proofs and never materializes
/// `A^Q` unless asked.
#[derive(Clone, Debug, PartialEq)]
pub struct PcpProofDistribution<S> {
    positions: usize,
    alphabet: usize,
    repr: Repr<S>,
}

impl<S: Scalar> PcpProofDistribution<S> {
    pub fn dense(positions: usize, alphabet: usize, table: Vec<S>) -> Result<Self> {
        Limits::from_env().check_table("proof distribution", checked_pow(alphabet, positions))?;
        let expected = index::pow(alphabet, positions);
        if table.len() != expected {
            return Err(Error::dims(format!("proof table has {} entries, expected {expected}", table.len())));
        }
        Ok(PcpProofDistribution { positions, alphabet, repr: Repr::Dense(table) })
    }

    pub fn mixture(positions: usize, alphabet: usize, components: Vec<(S, Vec<usize>)>) -> Result<Self> {
        for (_, proof) in &components {
            if proof.len() != positions || proof.iter().any(|&a| a >= alphabet) {
                return Err(Error::dims(format!("proof {proof:?} does not lie in A^Q for |A|={alphabet}, Q={positions}")));
            }
        }
        Ok(PcpProofDistribution { positions, alphabet, repr: Repr::Mixture(components) })
    }

    pub fn point_mass(alphabet: usize, proof: Vec<usize>) -> Result<Self> {
        Self::mixture(proof.len(), alphabet, vec![(S::one(), proof)])
    }

    pub fn uniform(positions: usize, alphabet: usize) -> Result<Self> {
        Limits::from_env().check_table("proof distribution", checked_pow(alphabet, positions))?;
        let n = index::pow(alphabet, positions);
        Self::dense(positions, alphabet, vec![S::one() / S::from_usize(n); n])
    }

    pub fn positions(&self) -> usize {
        self.positions
    }
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    /// Weighted proofs with nonzero weight. Dense tables are scanned.
    pub fn support(&self) -> Vec<(S, Vec<usize>)> {
        match &self.repr {
            Repr::Mixture(c) => c.iter().filter(|(w, _)| !w.is_zero()).cloned().collect(),
            Repr::Dense(t) => t
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, w)| (w.clone(), index::decode(i, self.alphabet, self.positions)))
                .collect(),
        }
    }

    pub fn materialize(&self) -> Result<Vec<S>> {
        match &self.repr {
            Repr::Dense(t) => Ok(t.clone()),
            Repr::Mixture(c) => {
                Limits::from_env().check_table("proof distribution", checked_pow(self.alphabet, self.positions))?;
                let mut t = vec![S::zero(); index::pow(self.alphabet, self.positions)];
                for (w, proof) in c {
                    let i = index::encode(proof, self.alphabet);
                    t[i] = t[i].clone() + w.clone();
                }
                Ok(t)
            }
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let weights: Vec<S> = match &self.repr {
            Repr::Dense(t) => t.clone(),
            Repr::Mixture(c) => c.iter().map(|(w, _)| w.clone()).collect(),
        };
        check_distribution(&mut report, "theta", &weights, 1e-9);
        report
    }

    /// The induced distribution of `(Pi[q1], Pi[q2], Pi[q3])`, indexed
    /// `a1 * |A|^2 + a2 * |A| + a3`.
    pub fn triple_distribution(&self, triple: [usize; 3]) -> Result<Vec<S>> {
        if let Some(&q) = triple.iter().find(|&&q| q >= self.positions) {
            return Err(Error::invalid(format!("position {q} out of range for Q={}", self.positions)));
        }
        let a = self.alphabet;
        let mut out = vec![S::zero(); a * a * a];
        let mut add = |w: &S, letter: &dyn Fn(usize) -> usize| {
            let i = (letter(triple[0]) * a + letter(triple[1])) * a + letter(triple[2]);
            out[i] = out[i].clone() + w.clone();
        };
        match &self.repr {
            Repr::Mixture(c) => {
                for (w, proof) in c {
                    add(w, &|q| proof[q]);
                }
            }
            Repr::Dense(t) => {
                let n = self.positions;
                for (i, w) in t.iter().enumerate() {
                    if w.is_zero() {
                        continue;
                    }
                    add(w, &|q| (i / index::pow(a, n - 1 - q)) % a);
                }
            }
        }
        Ok(out)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PcpProofDistribution<T> {
        let repr = match &self.repr {
            Repr::Dense(t) => Repr::Dense(t.iter().map(&f).collect()),
            Repr::Mixture(c) => Repr::Mixture(c.iter().map(|(w, p)| (f(w), p.clone())).collect()),
        };
        PcpProofDistribution { positions: self.positions, alphabet: self.alphabet, repr }
    }
}

/// `sum_T pi(T) sum_Pi theta(Pi) R(Pi[q1], Pi[q2], Pi[q3] | T)`.
pub fn eval_pcp<S: Scalar>(game: &PcpGame<S>, proof: &PcpProofDistribution<S>) -> Result<S> {
    if proof.positions != game.positions() || proof.alphabet != game.alphabet() {
        return Err(Error::dims("proof distribution does not match the game's positions or alphabet"));
    }
    let mut total = S::zero();
    for c in 0..game.check_count() {
        let dist = proof.triple_distribution(game.triple(c))?;
        let win: S = dist
            .iter()
            .zip(game.accept_row(c))
            .filter(|(_, &bit)| bit == 1)
            .map(|(p, _)| p.clone())
            .sum();
        total = total + game.pi(c).clone() * win;
    }
    Ok(total)
}
