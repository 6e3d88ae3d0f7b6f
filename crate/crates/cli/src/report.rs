//! Machine-readable check reports.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub max_err: f64,
    pub tol: f64,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Passes iff `max_err <= tol`; a NaN error fails.
    pub fn new(name: impl Into<String>, max_err: f64, tol: f64, n: usize) -> Self {
        let status = if max_err <= tol { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, max_err, tol, n, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub verdict: Status,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Self {
        let verdict = if checks.iter().all(Check::passed) { Status::Pass } else { Status::Fail };
        Report { checks, verdict }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Status::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// Largest of `values`, propagating NaN.
pub fn max_err(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}
