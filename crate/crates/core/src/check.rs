//! Outcome of comparing the two sides of an identity.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    SkippedPole,
    Diverged,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::SkippedPole => "skipped-pole",
            Status::Diverged => "diverged",
        }
    }

    /// Statuses that make a verification run unsuccessful.
    pub fn is_failure(self) -> bool {
        matches!(self, Status::Fail | Status::Diverged)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub status: Status,
    pub terms_used: usize,
    pub tolerance: f64,
    pub diagnostic: Option<String>,
}

pub fn relative_error(lhs: f64, rhs: f64) -> f64 {
    let abs = (lhs - rhs).abs();
    abs / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
}

impl CheckResult {
    /// Grades `lhs` against `rhs` with a relative tolerance.
    pub fn compare(lhs: f64, rhs: f64, terms_used: usize, tolerance: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = relative_error(lhs, rhs);
        let status = if rel_err <= tolerance { Status::Pass } else { Status::Fail };
        CheckResult { lhs, rhs, abs_err, rel_err, status, terms_used, tolerance, diagnostic: None }
    }

    /// Exact comparison (used by rational checks): pass iff equal.
    pub fn exact(lhs: f64, rhs: f64, equal: bool, terms_used: usize) -> Self {
        let mut r = Self::compare(lhs, rhs, terms_used, 0.0);
        r.status = if equal { Status::Pass } else { Status::Fail };
        if !equal {
            r.diagnostic = Some("exact rational sides differ".into());
        }
        r
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        Self::non_numeric(Status::SkippedPole, reason.into())
    }

    pub fn diverged(reason: impl Into<String>) -> Self {
        Self::non_numeric(Status::Diverged, reason.into())
    }

    fn non_numeric(status: Status, reason: String) -> Self {
        CheckResult {
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_err: f64::NAN,
            rel_err: f64::NAN,
            status,
            terms_used: 0,
            tolerance: f64::NAN,
            diagnostic: Some(reason),
        }
    }

    /// Maps an evaluation error onto the matching non-numeric status.
    pub fn from_error(err: &Error) -> Self {
        match err {
            Error::Truncation { .. } | Error::Divergent { .. } | Error::Quadrature { .. } => {
                Self::diverged(err.to_string())
            }
            Error::ZeroDenominator { .. } | Error::Pole { .. } | Error::Domain(_) => Self::skipped(err.to_string()),
            Error::AtNode { source, .. } => {
                let mut r = Self::from_error(source);
                r.diagnostic = Some(err.to_string());
                r
            }
            _ => Self::non_numeric(Status::Fail, err.to_string()),
        }
    }

    /// Re-grades a numeric result against a different tolerance.
    pub fn regrade(mut self, tolerance: f64) -> Self {
        if matches!(self.status, Status::Pass | Status::Fail) && self.tolerance > 0.0 {
            self.tolerance = tolerance;
            self.status = if self.rel_err <= tolerance { Status::Pass } else { Status::Fail };
        }
        self
    }

    pub fn with_diagnostic(mut self, note: impl Into<String>) -> Self {
        self.diagnostic = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Folds a secondary comparison into this one; the worse outcome wins.
    pub fn and(mut self, other: CheckResult, label: &str) -> Self {
        self.terms_used += other.terms_used;
        if other.status != Status::Pass && self.status == Status::Pass {
            self.status = other.status;
            self.diagnostic =
                Some(format!("{label}: rel_err {:.3e} ({})", other.rel_err, other.diagnostic.unwrap_or_default()));
        }
        self
    }
}

/// Converts a `Result<CheckResult>` produced by a fallible evaluator.
pub fn settle(result: crate::error::Result<CheckResult>) -> CheckResult {
    result.unwrap_or_else(|e| CheckResult::from_error(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_err_uses_larger_magnitude() {
        let r = CheckResult::compare(1.0, 1.0 + 1e-10, 3, 1e-9);
        assert!(r.passed());
        assert!((r.rel_err - r.abs_err / (1.0 + 1e-10)).abs() < 1e-25);
        assert_eq!(r.terms_used, 3);
    }

    #[test]
    fn zero_both_sides_is_a_pass() {
        let r = CheckResult::compare(0.0, 0.0, 0, 1e-12);
        assert_eq!(r.rel_err, 0.0);
        assert!(r.passed());
    }

    #[test]
    fn regrade_flips_status() {
        let r = CheckResult::compare(1.0, 1.001, 1, 1e-2);
        assert!(r.passed());
        assert_eq!(r.regrade(1e-6).status, Status::Fail);
    }

    #[test]
    fn errors_map_to_statuses() {
        let pole = Error::ZeroDenominator { context: "x", index: 2 };
        assert_eq!(CheckResult::from_error(&pole).status, Status::SkippedPole);
        let div = Error::Divergent { argument: 1.5 };
        assert_eq!(CheckResult::from_error(&div).status, Status::Diverged);
    }
}
