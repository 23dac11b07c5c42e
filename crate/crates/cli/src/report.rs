use std::fs;
use std::path::Path;

use affinity_lab::{dyadic_fraction, BoundReport};
use serde::Serialize;

use crate::CliError;

/// One checked inequality as written to verify/famine reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub check: String,
    pub instance: usize,
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub holds: bool,
    pub lhs_fraction: Option<String>,
    pub rhs_fraction: Option<String>,
    pub lhs_provenance: String,
    pub rhs_provenance: String,
}

impl Row {
    pub fn new(instance: usize, label: impl Into<String>, b: BoundReport) -> Self {
        Row {
            lhs_fraction: dyadic_fraction(b.lhs),
            rhs_fraction: dyadic_fraction(b.rhs),
            check: b.check,
            instance,
            label: label.into(),
            lhs: b.lhs,
            rhs: b.rhs,
            slack: b.slack,
            tolerance: b.tolerance,
            holds: b.holds,
            lhs_provenance: b.lhs_provenance,
            rhs_provenance: b.rhs_provenance,
        }
    }

    /// Negative control: push `rhs` below `lhs` by more than the tolerance.
    pub fn corrupt(&mut self) {
        self.rhs = self.lhs - 1.0 - self.tolerance;
        self.rhs_fraction = dyadic_fraction(self.rhs);
        self.slack = self.rhs - self.lhs;
        self.holds = false;
        self.rhs_provenance = "corrupted".into();
    }
}

/// JSON number that prints without a fractional part when integral.
pub fn number(x: f64) -> serde_json::Value {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15 {
        serde_json::Value::from(x as i64)
    } else {
        serde_json::Value::from(x)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn report_violations(rows: &[Row]) -> bool {
    let mut any = false;
    for row in rows.iter().filter(|r| !r.holds) {
        any = true;
        eprintln!(
            "violation: {}",
            serde_json::to_string(row).unwrap_or_else(|_| row.check.clone())
        );
    }
    any
}
