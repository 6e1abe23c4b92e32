//! The two strategy-rounding constructions, with every intermediate
//! inequality reported as a measured left side against its bound.
//!
//! [`ns`] rounds a no-signaling strategy of an oracularized multi-round game
//! to a single-prover strategy through the second prover's prefix answers.
//! [`com`] rounds a projective entangled strategy of a dummy-oracularized PCP
//! game to a proof distribution by sequential measurement.

pub mod com;
pub mod ns;

use serde::Serialize;

use crate::scalar::Scalar;

pub use com::{
    com_decompose, round_com, verify_claim_selection, verify_com_claims, verify_lemma_distance, ComRounding,
    ComRoundingTables, LemmaDistance,
};
pub use ns::{
    canonicalize_prefix_answers, hybrid_family, ns_decompose, round_no_signaling, verify_ns_claims, HybridFamily,
    NsMarginalTables,
};

/// One checked inequality `lhs <= rhs + tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality<S> {
    pub label: String,
    pub lhs: S,
    pub rhs: S,
    pub tolerance: S,
    pub holds: bool,
}

impl<S: Scalar> Inequality<S> {
    pub fn new(label: impl Into<String>, lhs: S, rhs: S, tolerance: S) -> Self {
        let holds = lhs <= rhs.clone() + tolerance.clone();
        Inequality { label: label.into(), lhs, rhs, tolerance, holds }
    }

    pub fn to_row(&self) -> InequalityRow {
        InequalityRow {
            label: self.label.clone(),
            lhs: self.lhs.to_text(),
            rhs: self.rhs.to_text(),
            tolerance: self.tolerance.to_text(),
            holds: self.holds,
        }
    }
}

/// Text form of an [`Inequality`] for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityRow {
    pub label: String,
    pub lhs: String,
    pub rhs: String,
    pub tolerance: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport<S> {
    pub entries: Vec<Inequality<S>>,
}

impl<S: Scalar> Default for InequalityReport<S> {
    fn default() -> Self {
        InequalityReport { entries: Vec::new() }
    }
}

impl<S: Scalar> InequalityReport<S> {
    pub fn check(&mut self, label: impl Into<String>, lhs: S, rhs: S, tolerance: &S) {
        self.entries.push(Inequality::new(label, lhs, rhs, tolerance.clone()));
    }

    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn violations(&self) -> Vec<&Inequality<S>> {
        self.entries.iter().filter(|e| !e.holds).collect()
    }

    pub fn get(&self, label: &str) -> Option<&Inequality<S>> {
        self.entries.iter().find(|e| e.label == label)
    }

    /// Adds `delta` to every left side and re-evaluates. Used to exercise
    /// the failure path of verification reports.
    pub fn perturbed(&self, delta: &S) -> Self {
        InequalityReport {
            entries: self
                .entries
                .iter()
                .map(|e| Inequality::new(e.label.clone(), e.lhs.clone() + delta.clone(), e.rhs.clone(), e.tolerance.clone()))
                .collect(),
        }
    }

    /// Pushes the left side of entry `i` to `rhs + tolerance + delta`.
    pub fn perturb_entry(&mut self, i: usize, delta: &S) {
        if let Some(e) = self.entries.get_mut(i) {
            let lhs = e.rhs.clone() + e.tolerance.clone() + delta.clone();
            *e = Inequality::new(e.label.clone(), lhs, e.rhs.clone(), e.tolerance.clone());
        }
    }

    pub fn extend(&mut self, other: InequalityReport<S>) {
        self.entries.extend(other.entries);
    }

    pub fn rows(&self) -> Vec<InequalityRow> {
        self.entries.iter().map(Inequality::to_row).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn exact_comparison_and_perturbation() {
        let mut report = InequalityReport::default();
        report.check("tight", Rational::from_ratio(1, 3), Rational::from_ratio(1, 3), &Rational::from_ratio(0, 1));
        assert!(report.all_hold());
        let bumped = report.perturbed(&Rational::from_ratio(1, 1000));
        assert!(!bumped.all_hold());
        assert_eq!(bumped.violations()[0].label, "tight");
        assert_eq!(report.rows()[0].lhs, "1/3");
        let mut broken = report.clone();
        broken.perturb_entry(0, &Rational::from_ratio(1, 10));
        assert!(!broken.all_hold());
        assert_eq!(broken.entries[0].lhs, Rational::from_ratio(13, 30));
    }
}
