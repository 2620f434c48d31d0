use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Outcome of one inequality check, oriented so that `pass ⇔ margin >= -tolerance`
/// with `margin = rhs - lhs`.
///
/// `pass` is `None` when the check is inconclusive (a solver did not
/// converge); such a report is neither a pass nor a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: Option<bool>,
    pub metadata: serde_json::Value,
}

impl CheckReport {
    pub fn new(check_id: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64, metadata: serde_json::Value) -> Self {
        let margin = rhs - lhs;
        Self {
            check_id: check_id.into(),
            lhs,
            rhs,
            margin,
            tolerance,
            pass: Some(margin >= -tolerance),
            metadata,
        }
    }

    pub fn inconclusive(
        check_id: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        metadata: serde_json::Value,
    ) -> Self {
        Self {
            pass: None,
            ..Self::new(check_id, lhs, rhs, tolerance, metadata)
        }
    }

    /// `new` or `inconclusive` depending on `conclusive`.
    pub fn graded(
        check_id: impl Into<String>,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        metadata: serde_json::Value,
        conclusive: bool,
    ) -> Self {
        if conclusive {
            Self::new(check_id, lhs, rhs, tolerance, metadata)
        } else {
            Self::inconclusive(check_id, lhs, rhs, tolerance, metadata)
        }
    }

    pub fn is_violation(&self) -> bool {
        self.pass == Some(false)
    }
}

/// Tolerance budget of a check: the numerical tolerance of the method plus
/// the truncation bound of the Fock cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub solver: f64,
    pub truncation: f64,
}

impl Budget {
    pub fn total(&self) -> f64 {
        self.solver + self.truncation
    }
}

/// Cost-weighted bound for `tail` mass lost above cutoff `d`: the Gaussian
/// cost operator is of order `2d` on the top levels.
pub fn truncation_bound(d: usize, tail: f64) -> f64 {
    2.0 * d as f64 * tail
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub total: usize,
    pub passed: usize,
    pub violations: usize,
    pub inconclusive: usize,
}

pub fn tally(reports: &[CheckReport]) -> Tally {
    let passed = reports.iter().filter(|r| r.pass == Some(true)).count();
    let violations = reports.iter().filter(|r| r.is_violation()).count();
    Tally {
        total: reports.len(),
        passed,
        violations,
        inconclusive: reports.len() - passed - violations,
    }
}

pub fn write_reports_json(path: &Path, reports: &[CheckReport]) -> Result<()> {
    crate::runner::write_atomic(path, serde_json::to_string_pretty(reports)?.as_bytes())
}

/// CSV with columns `check_id, lhs, rhs, margin, tolerance, pass`; an
/// inconclusive check has an empty `pass` field.
pub fn write_reports_csv(path: &Path, reports: &[CheckReport]) -> Result<()> {
    crate::runner::write_atomic(path, &reports_csv(reports)?)
}

pub fn reports_csv(reports: &[CheckReport]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check_id", "lhs", "rhs", "margin", "tolerance", "pass"])?;
    for r in reports {
        w.write_record([
            r.check_id.clone(),
            format!("{:.12e}", r.lhs),
            format!("{:.12e}", r.rhs),
            format!("{:.12e}", r.margin),
            format!("{:.3e}", r.tolerance),
            r.pass.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation() {
        let ok = CheckReport::new("x", 1.0, 1.0 - 1e-9, 1e-8, serde_json::Value::Null);
        assert_eq!(ok.pass, Some(true));
        let bad = CheckReport::new("x", 1.0, 0.9, 1e-8, serde_json::Value::Null);
        assert!(bad.is_violation());
        assert!((bad.margin + 0.1).abs() < 1e-15);
        let inc = CheckReport::inconclusive("x", 1.0, 0.0, 0.0, serde_json::Value::Null);
        assert!(!inc.is_violation() && inc.pass.is_none());
        let t = tally(&[ok, bad, inc]);
        assert_eq!((t.passed, t.violations, t.inconclusive), (1, 1, 1));
    }
}
