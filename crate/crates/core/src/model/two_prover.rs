use serde::{Deserialize, Serialize};

use super::validate::{check_distribution, ValidationReport, ViolationKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Optional human-readable names; indices are what every table uses.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labels {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q1: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub q2: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a1: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub a2: Vec<String>,
}

impl Labels {
    pub fn is_empty(&self) -> bool {
        self.q1.is_empty() && self.q2.is_empty() && self.a1.is_empty() && self.a2.is_empty()
    }
}

/// A two-prover one-round game `(Q1, Q2, A1, A2, R, pi)`.
///
/// `pi` is indexed by `q1 * q2_count + q2`. The predicate is indexed by
/// `((q1 * q2_count + q2) * a1_count + a1) * a2_count + a2` and holds the
/// acceptance probability of the verifier; for ordinary games every entry is
/// 0 or 1. Fractional entries arise when a transform integrates out verifier
/// coins that neither prover sees.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoProverGame<S> {
    q1_count: usize,
    q2_count: usize,
    a1_count: usize,
    a2_count: usize,
    pi: Vec<S>,
    predicate: Vec<S>,
    pub labels: Labels,
}

impl<S: Scalar> TwoProverGame<S> {
    pub fn new(
        counts: [usize; 4],
        pi: Vec<S>,
        predicate: Vec<S>,
    ) -> Result<Self> {
        let [q1_count, q2_count, a1_count, a2_count] = counts;
        if counts.contains(&0) {
            return Err(Error::invalid(format!("question and answer counts must be positive, got {counts:?}")));
        }
        if pi.len() != q1_count * q2_count {
            return Err(Error::dims(format!(
                "pi has {} entries, expected {}",
                pi.len(),
                q1_count * q2_count
            )));
        }
        let expected = q1_count * q2_count * a1_count * a2_count;
        if predicate.len() != expected {
            return Err(Error::dims(format!(
                "predicate has {} entries, expected {expected}",
                predicate.len()
            )));
        }
        Ok(TwoProverGame { q1_count, q2_count, a1_count, a2_count, pi, predicate, labels: Labels::default() })
    }

    /// Builds a game from closures over indices.
    pub fn from_fn(
        counts: [usize; 4],
        mut pi: impl FnMut(usize, usize) -> S,
        mut predicate: impl FnMut(usize, usize, usize, usize) -> S,
    ) -> Result<Self> {
        let [q1c, q2c, a1c, a2c] = counts;
        let mut pi_table = Vec::with_capacity(q1c * q2c);
        let mut pred = Vec::with_capacity(q1c * q2c * a1c * a2c);
        for q1 in 0..q1c {
            for q2 in 0..q2c {
                pi_table.push(pi(q1, q2));
                for a1 in 0..a1c {
                    for a2 in 0..a2c {
                        pred.push(predicate(q1, q2, a1, a2));
                    }
                }
            }
        }
        Self::new(counts, pi_table, pred)
    }

    pub fn with_labels(mut self, labels: Labels) -> Self {
        self.labels = labels;
        self
    }

    pub fn counts(&self) -> [usize; 4] {
        [self.q1_count, self.q2_count, self.a1_count, self.a2_count]
    }
    pub fn q1_count(&self) -> usize {
        self.q1_count
    }
    pub fn q2_count(&self) -> usize {
        self.q2_count
    }
    pub fn a1_count(&self) -> usize {
        self.a1_count
    }
    pub fn a2_count(&self) -> usize {
        self.a2_count
    }

    pub fn pi(&self, q1: usize, q2: usize) -> &S {
        &self.pi[q1 * self.q2_count + q2]
    }

    pub fn pi_table(&self) -> &[S] {
        &self.pi
    }

    pub fn predicate(&self, q1: usize, q2: usize, a1: usize, a2: usize) -> &S {
        &self.predicate[self.entry(q1, q2, a1, a2)]
    }

    pub fn predicate_table(&self) -> &[S] {
        &self.predicate
    }

    /// Predicate entries for one question pair, `a1 * a2_count + a2`.
    pub fn predicate_row(&self, q1: usize, q2: usize) -> &[S] {
        let block = self.a1_count * self.a2_count;
        let start = (q1 * self.q2_count + q2) * block;
        &self.predicate[start..start + block]
    }

    fn entry(&self, q1: usize, q2: usize, a1: usize, a2: usize) -> usize {
        ((q1 * self.q2_count + q2) * self.a1_count + a1) * self.a2_count + a2
    }

    /// Question pairs with positive probability, in index order.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for q1 in 0..self.q1_count {
            for q2 in 0..self.q2_count {
                if *self.pi(q1, q2) > S::zero() {
                    out.push((q1, q2));
                }
            }
        }
        out
    }

    pub fn is_boolean_predicate(&self) -> bool {
        self.predicate.iter().all(|v| v.is_zero() || v.is_one())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.pi.len() != self.q1_count * self.q2_count
            || self.predicate.len() != self.q1_count * self.q2_count * self.a1_count * self.a2_count
        {
            report.push(ViolationKind::Dimension, "table sizes do not match counts");
            return report;
        }
        check_distribution(&mut report, "pi", &self.pi, 1e-12);
        if let Some(bad) = self.predicate.iter().find(|v| **v < S::zero() || **v > S::one()) {
            report.push(
                ViolationKind::PredicateRange,
                format!("predicate entry {bad} outside [0, 1]"),
            );
        }
        report
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TwoProverGame<T> {
        TwoProverGame {
            q1_count: self.q1_count,
            q2_count: self.q2_count,
            a1_count: self.a1_count,
            a2_count: self.a2_count,
            pi: self.pi.iter().map(&f).collect(),
            predicate: self.predicate.iter().map(&f).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_float(&self) -> TwoProverGame<f64> {
        self.map_scalar(|v| v.to_f64())
    }

    /// Per-entry products `pi(q1,q2) * R(a1,a2|q1,q2)`, same layout as the
    /// predicate. Value computations only ever need these weights.
    pub fn weights(&self) -> Vec<S> {
        let block = self.a1_count * self.a2_count;
        self.predicate
            .iter()
            .enumerate()
            .map(|(i, r)| self.pi[i / block].clone() * r.clone())
            .collect()
    }

    /// The same game with prover roles exchanged.
    pub fn swap_provers(&self) -> TwoProverGame<S> {
        let [q1c, q2c, a1c, a2c] = self.counts();
        let mut out = TwoProverGame::from_fn(
            [q2c, q1c, a2c, a1c],
            |q2, q1| self.pi(q1, q2).clone(),
            |q2, q1, a2, a1| self.predicate(q1, q2, a1, a2).clone(),
        )
        .expect("swapped dimensions are consistent");
        out.labels = Labels {
            q1: self.labels.q2.clone(),
            q2: self.labels.q1.clone(),
            a1: self.labels.a2.clone(),
            a2: self.labels.a1.clone(),
        };
        out
    }
}

/// A joint conditional answer table `theta(a1, a2 | q1, q2)`, laid out like
/// the game predicate.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteStrategy<S> {
    counts: [usize; 4],
    table: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoSignalingCheck<S> {
    pub no_signaling: bool,
    /// Largest difference between two marginals that should agree.
    pub max_violation: S,
}

impl<S: Scalar> BipartiteStrategy<S> {
    pub fn new(counts: [usize; 4], table: Vec<S>) -> Result<Self> {
        let expected: usize = counts.iter().product();
        if table.len() != expected {
            return Err(Error::dims(format!("strategy table has {} entries, expected {expected}", table.len())));
        }
        Ok(BipartiteStrategy { counts, table })
    }

    pub fn from_fn(counts: [usize; 4], mut f: impl FnMut(usize, usize, usize, usize) -> S) -> Self {
        let [q1c, q2c, a1c, a2c] = counts;
        let mut table = Vec::with_capacity(q1c * q2c * a1c * a2c);
        for q1 in 0..q1c {
            for q2 in 0..q2c {
                for a1 in 0..a1c {
                    for a2 in 0..a2c {
                        table.push(f(q1, q2, a1, a2));
                    }
                }
            }
        }
        BipartiteStrategy { counts, table }
    }

    /// Independent local strategies: `theta = p1(a1|q1) * p2(a2|q2)`.
    pub fn product(local1: &[Vec<S>], local2: &[Vec<S>]) -> Result<Self> {
        let a1c = local1.first().map_or(0, Vec::len);
        let a2c = local2.first().map_or(0, Vec::len);
        if local1.iter().any(|d| d.len() != a1c) || local2.iter().any(|d| d.len() != a2c) {
            return Err(Error::dims("local distributions have ragged answer counts"));
        }
        let counts = [local1.len(), local2.len(), a1c, a2c];
        Ok(Self::from_fn(counts, |q1, q2, a1, a2| local1[q1][a1].clone() * local2[q2][a2].clone()))
    }

    pub fn counts(&self) -> [usize; 4] {
        self.counts
    }

    pub fn prob(&self, q1: usize, q2: usize, a1: usize, a2: usize) -> &S {
        let [_, q2c, a1c, a2c] = self.counts;
        &self.table[((q1 * q2c + q2) * a1c + a1) * a2c + a2]
    }

    pub fn table(&self) -> &[S] {
        &self.table
    }

    /// The answer distribution for one question pair, `a1 * a2_count + a2`.
    pub fn row(&self, q1: usize, q2: usize) -> &[S] {
        let [_, q2c, a1c, a2c] = self.counts;
        let block = a1c * a2c;
        let start = (q1 * q2c + q2) * block;
        &self.table[start..start + block]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let [q1c, q2c, _, _] = self.counts;
        for q1 in 0..q1c {
            for q2 in 0..q2c {
                check_distribution(&mut report, &format!("theta(.|{q1},{q2})"), self.row(q1, q2), 1e-9);
            }
        }
        report
    }

    pub fn marginal1(&self, q1: usize, q2: usize) -> Vec<S> {
        let [_, _, a1c, a2c] = self.counts;
        let row = self.row(q1, q2);
        (0..a1c).map(|a1| row[a1 * a2c..(a1 + 1) * a2c].iter().cloned().sum()).collect()
    }

    pub fn marginal2(&self, q1: usize, q2: usize) -> Vec<S> {
        let [_, _, a1c, a2c] = self.counts;
        let row = self.row(q1, q2);
        (0..a2c).map(|a2| (0..a1c).map(|a1| row[a1 * a2c + a2].clone()).sum()).collect()
    }

    /// Checks that each prover's marginal ignores the other prover's
    /// question, reporting the largest discrepancy.
    pub fn is_no_signaling(&self, tol: &S) -> NoSignalingCheck<S> {
        let [q1c, q2c, _, _] = self.counts;
        let mut worst = S::zero();
        let mut update = |a: &[S], b: &[S]| {
            for (x, y) in a.iter().zip(b) {
                let d = (x.clone() - y.clone()).abs();
                if d > worst {
                    worst = d;
                }
            }
        };
        for q1 in 0..q1c {
            let reference = self.marginal1(q1, 0);
            for q2 in 1..q2c {
                update(&reference, &self.marginal1(q1, q2));
            }
        }
        for q2 in 0..q2c {
            let reference = self.marginal2(0, q2);
            for q1 in 1..q1c {
                update(&reference, &self.marginal2(q1, q2));
            }
        }
        NoSignalingCheck { no_signaling: worst <= *tol, max_violation: worst }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> BipartiteStrategy<T> {
        BipartiteStrategy { counts: self.counts, table: self.table.iter().map(f).collect() }
    }
}

/// A pair of answer functions; the optimum over unentangled strategies is
/// always attained by one of these.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicBipartiteStrategy {
    pub f1: Vec<usize>,
    pub f2: Vec<usize>,
}

impl DeterministicBipartiteStrategy {
    pub fn new(f1: Vec<usize>, f2: Vec<usize>) -> Self {
        DeterministicBipartiteStrategy { f1, f2 }
    }

    /// Point-mass conditional table.
    pub fn embed<S: Scalar>(&self, a1_count: usize, a2_count: usize) -> Result<BipartiteStrategy<S>> {
        if self.f1.iter().any(|&a| a >= a1_count) || self.f2.iter().any(|&a| a >= a2_count) {
            return Err(Error::dims("deterministic answer out of range"));
        }
        let counts = [self.f1.len(), self.f2.len(), a1_count, a2_count];
        Ok(BipartiteStrategy::from_fn(counts, |q1, q2, a1, a2| {
            if self.f1[q1] == a1 && self.f2[q2] == a2 {
                S::one()
            } else {
                S::zero()
            }
        }))
    }

    /// Winning probability without materializing the point-mass table.
    pub fn evaluate<S: Scalar>(&self, game: &TwoProverGame<S>) -> Result<S> {
        let [q1c, q2c, a1c, a2c] = game.counts();
        if self.f1.len() != q1c || self.f2.len() != q2c {
            return Err(Error::dims("deterministic strategy does not match game question counts"));
        }
        if self.f1.iter().any(|&a| a >= a1c) || self.f2.iter().any(|&a| a >= a2c) {
            return Err(Error::dims("deterministic answer out of range"));
        }
        let mut total = S::zero();
        for q1 in 0..q1c {
            for q2 in 0..q2c {
                let p = game.pi(q1, q2);
                if p.is_zero() {
                    continue;
                }
                total = total + p.clone() * game.predicate(q1, q2, self.f1[q1], self.f2[q2]).clone();
            }
        }
        Ok(total)
    }
}

/// `sum_{q1,q2} pi(q1,q2) sum_{a1,a2} theta(a1,a2|q1,q2) R(a1,a2|q1,q2)`.
pub fn eval_two_prover<S: Scalar>(game: &TwoProverGame<S>, strategy: &BipartiteStrategy<S>) -> Result<S> {
    if game.counts() != strategy.counts() {
        return Err(Error::dims(format!(
            "game counts {:?} vs strategy counts {:?}",
            game.counts(),
            strategy.counts()
        )));
    }
    let [q1c, q2c, _, _] = game.counts();
    let mut total = S::zero();
    for q1 in 0..q1c {
        for q2 in 0..q2c {
            let p = game.pi(q1, q2);
            if p.is_zero() {
                continue;
            }
            let inner: S = game
                .predicate_row(q1, q2)
                .iter()
                .zip(strategy.row(q1, q2))
                .filter(|(r, _)| !r.is_zero())
                .map(|(r, t)| r.clone() * t.clone())
                .sum();
            total = total + p.clone() * inner;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::scalar::Rational;
    use num::{One, Zero};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn chsh_is_valid() {
        assert!(catalog::chsh().validate().is_valid());
    }

    #[test]
    fn unnormalized_pi_is_reported() {
        let g = TwoProverGame::from_fn([1, 2, 1, 1], |_, _| r(9, 20), |_, _, _, _| r(1, 1)).unwrap();
        let report = g.validate();
        assert!(report.has(ViolationKind::Normalization));
        assert!(report.to_string().contains("9/10"));
    }

    #[test]
    fn predicate_out_of_range_is_reported() {
        let g = TwoProverGame::from_fn([1, 1, 2, 1], |_, _| r(1, 1), |_, _, a1, _| r(2 * a1 as i64, 1)).unwrap();
        assert!(g.validate().has(ViolationKind::PredicateRange));
    }

    #[test]
    fn constructor_rejects_bad_dimensions() {
        assert!(matches!(
            TwoProverGame::new([2, 2, 2, 2], vec![r(1, 4); 3], vec![r(0, 1); 16]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn always_accepting_game_has_value_one() {
        let g = TwoProverGame::from_fn([2, 3, 2, 2], |_, _| r(1, 6), |_, _, _, _| r(1, 1)).unwrap();
        let s = BipartiteStrategy::from_fn([2, 3, 2, 2], |_, _, _, _| r(1, 4));
        assert_eq!(eval_two_prover(&g, &s).unwrap(), r(1, 1));
    }

    #[test]
    fn chsh_all_zero_answers_wins_three_quarters() {
        let g = catalog::chsh();
        let det = DeterministicBipartiteStrategy::new(vec![0, 0], vec![0, 0]);
        let s = det.embed::<Rational>(2, 2).unwrap();
        assert_eq!(eval_two_prover(&g, &s).unwrap(), r(3, 4));
        assert_eq!(det.evaluate(&g).unwrap(), r(3, 4));
    }

    #[test]
    fn pr_box_is_no_signaling() {
        let s = BipartiteStrategy::from_fn([2, 2, 2, 2], |q1, q2, a1, a2| {
            if (a1 ^ a2) == (q1 & q2) {
                r(1, 2)
            } else {
                r(0, 1)
            }
        });
        let check = s.is_no_signaling(&Rational::zero());
        assert!(check.no_signaling);
        assert!(check.max_violation.is_zero());
        assert_eq!(eval_two_prover(&catalog::chsh(), &s).unwrap(), r(1, 1));
    }

    #[test]
    fn copying_other_question_signals() {
        let s = BipartiteStrategy::from_fn([2, 2, 2, 2], |_, q2, a1, a2| {
            if a1 == q2 && a2 == 0 {
                r(1, 1)
            } else {
                r(0, 1)
            }
        });
        let check = s.is_no_signaling(&Rational::zero());
        assert!(!check.no_signaling);
        assert!(check.max_violation.is_one());
    }

    #[test]
    fn mismatched_strategy_is_rejected() {
        let g = catalog::chsh();
        let s = BipartiteStrategy::from_fn([2, 2, 3, 2], |_, _, _, _| r(1, 6));
        assert!(eval_two_prover(&g, &s).is_err());
    }

    #[test]
    fn swap_provers_preserves_values() {
        let g = catalog::chsh();
        let det = DeterministicBipartiteStrategy::new(vec![0, 1], vec![1, 0]);
        let swapped = DeterministicBipartiteStrategy::new(det.f2.clone(), det.f1.clone());
        assert_eq!(det.evaluate(&g).unwrap(), swapped.evaluate(&g.swap_provers()).unwrap());
    }
}
