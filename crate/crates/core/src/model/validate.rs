use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Dimension,
    Negative,
    Normalization,
    PredicateRange,
    Support,
    OutOfRange,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

/// Every invariant a game or strategy violates. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    pub(crate) fn push(&mut self, kind: ViolationKind, message: impl Into<String>) {
        self.violations.push(Violation { kind, message: message.into() });
    }

    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Validation(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{:?}: {}", v.kind, v.message))
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks that `values` is a probability distribution, pushing violations
/// tagged with `what`. Float tables may miss 1 by `float_slack`.
pub(crate) fn check_distribution<S: crate::Scalar>(
    report: &mut ValidationReport,
    what: &str,
    values: &[S],
    float_slack: f64,
) {
    if let Some(bad) = values.iter().find(|v| **v < S::zero()) {
        report.push(ViolationKind::Negative, format!("{what} has negative entry {bad}"));
    }
    let total: S = values.iter().cloned().sum();
    let ok = match S::MODE {
        crate::ScalarMode::Rational => total == S::one(),
        crate::ScalarMode::Float => (total.to_f64() - 1.0).abs() <= float_slack,
    };
    if !ok {
        report.push(ViolationKind::Normalization, format!("{what} sums to {total}, expected 1"));
    }
}
