//! Pass/fail records shared by every numerical check.

use std::fmt::Write as _;

/// One inequality `lhs ≤ rhs + slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl PropertyReport {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64) -> Self {
        PropertyReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            pass: lhs <= rhs + slack,
        }
    }

    /// Record whose verdict is decided elsewhere.
    pub fn with_verdict(name: impl Into<String>, lhs: f64, rhs: f64, slack: f64, pass: bool) -> Self {
        PropertyReport {
            name: name.into(),
            lhs,
            rhs,
            slack,
            pass,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.name,
            fmt_f64(self.lhs),
            fmt_f64(self.rhs),
            fmt_f64(self.slack),
            self.pass
        )
    }
}

pub const CSV_HEADER: &str = "name,lhs,rhs,slack,pass";

/// Seventeen significant digits, enough for an exact round trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn to_csv(reports: &[PropertyReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(out, "{}", r.csv_row());
    }
    out
}
