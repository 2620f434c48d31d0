use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use super::commands::{Status, ThermalRow};
use super::write_atomic;
use crate::error::{QotError, Result};
use crate::lab::{reports_csv, tally, CheckReport, Tally};

/// Worst (smallest) margin of one check family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySummary {
    pub check_id: String,
    pub count: usize,
    pub violations: usize,
    pub inconclusive: usize,
    pub worst_margin: f64,
    pub worst_tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MergedReport {
    pub tally: Tally,
    pub families: Vec<FamilySummary>,
    pub failures: Vec<CheckReport>,
    pub thermal: Vec<ThermalRow>,
    #[serde(skip)]
    pub reports: Vec<CheckReport>,
}

impl MergedReport {
    pub fn status(&self) -> Status {
        if self.tally.violations > 0 {
            Status::CheckFailed
        } else {
            Status::Ok
        }
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        let t = &self.tally;
        let _ = writeln!(
            s,
            "{} reports: {} passed, {} violations, {} inconclusive",
            t.total, t.passed, t.violations, t.inconclusive
        );
        for f in &self.families {
            let _ = writeln!(
                s,
                "  {:<24} n={:<5} violations={:<3} inconclusive={:<3} worst margin {:+.3e} (tolerance {:.1e})",
                f.check_id, f.count, f.violations, f.inconclusive, f.worst_margin, f.worst_tolerance
            );
        }
        for r in &self.failures {
            let _ = writeln!(
                s,
                "FAIL {} lhs={:.6e} rhs={:.6e} margin={:+.3e} tolerance={:.1e} {}",
                r.check_id, r.lhs, r.rhs, r.margin, r.tolerance, r.metadata
            );
        }
        if !self.thermal.is_empty() {
            let _ = writeln!(s, "{} thermal rows", self.thermal.len());
        }
        s
    }
}

fn extract(doc: Value, path: &Path, reports: &mut Vec<CheckReport>, rows: &mut Vec<ThermalRow>) -> Result<()> {
    let bad = |what: &str| QotError::InvalidInput(format!("{}: {what}", path.display()));
    match doc {
        Value::Array(_) => reports.extend(serde_json::from_value::<Vec<CheckReport>>(doc).map_err(|e| bad(&e.to_string()))?),
        Value::Object(mut m) => {
            let result = m.remove("result").ok_or_else(|| bad("no `result` field"))?;
            if let Some(r) = result.get("reports") {
                reports.extend(serde_json::from_value::<Vec<CheckReport>>(r.clone()).map_err(|e| bad(&e.to_string()))?);
            }
            if let Some(r) = result.get("rows") {
                rows.extend(serde_json::from_value::<Vec<ThermalRow>>(r.clone()).map_err(|e| bad(&e.to_string()))?);
            }
        }
        _ => return Err(bad("expected a result document or a report array")),
    }
    Ok(())
}

/// Merges result files (`result.json` of any command, or a bare report array).
pub fn merge(paths: &[PathBuf]) -> Result<MergedReport> {
    let mut reports = Vec::new();
    let mut thermal = Vec::new();
    for p in paths {
        let text = std::fs::read_to_string(p)
            .map_err(|e| QotError::InvalidInput(format!("{}: {e}", p.display())))?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| QotError::InvalidInput(format!("{}: {e}", p.display())))?;
        extract(doc, p, &mut reports, &mut thermal)?;
    }
    thermal.sort_by(|a, b| a.nu.total_cmp(&b.nu).then(a.nu_prime.total_cmp(&b.nu_prime)));
    let mut by_family: BTreeMap<&str, Vec<&CheckReport>> = BTreeMap::new();
    for r in &reports {
        by_family.entry(&r.check_id).or_default().push(r);
    }
    let families = by_family
        .into_iter()
        .map(|(id, rs)| {
            let worst = rs
                .iter()
                .filter(|r| r.margin.is_finite())
                .min_by(|a, b| a.margin.total_cmp(&b.margin));
            FamilySummary {
                check_id: id.to_string(),
                count: rs.len(),
                violations: rs.iter().filter(|r| r.is_violation()).count(),
                inconclusive: rs.iter().filter(|r| r.pass.is_none()).count(),
                worst_margin: worst.map_or(f64::NAN, |r| r.margin),
                worst_tolerance: worst.map_or(f64::NAN, |r| r.tolerance),
            }
        })
        .collect();
    let failures = reports.iter().filter(|r| r.is_violation()).cloned().collect();
    Ok(MergedReport {
        tally: tally(&reports),
        families,
        failures,
        thermal,
        reports,
    })
}

/// Writes `report.csv`, `thermal.csv` (when thermal rows are present),
/// `report.json` and `summary.txt` into `out`.
pub fn write_merged(merged: &MergedReport, out: &Path) -> Result<()> {
    write_atomic(&out.join("report.csv"), &reports_csv(&merged.reports)?)?;
    if !merged.thermal.is_empty() {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &merged.thermal {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        write_atomic(&out.join("thermal.csv"), &bytes)?;
    }
    write_atomic(&out.join("report.json"), serde_json::to_string_pretty(merged)?.as_bytes())?;
    write_atomic(&out.join("summary.txt"), merged.text().as_bytes())
}
