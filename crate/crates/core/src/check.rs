//! Named pass/fail records shared by certificates and reports.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity (a violation when
    /// positive, unless `note` says otherwise).
    pub worst: f64,
    pub samples: usize,
    pub note: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, worst: f64, samples: usize, note: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, worst: if worst.is_finite() { worst } else { 0.0 }, samples, note: note.into() }
    }

    /// Passes when `worst <= limit`.
    pub fn at_most(name: &str, worst: f64, limit: f64, samples: usize, note: impl Into<String>) -> Self {
        Self::new(name, worst <= limit, worst, samples, note)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
