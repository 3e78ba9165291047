//! Certificate records.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::check::{all_passed, Check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    Exposed,
    PExposed,
    Refutation,
    FaceIntersection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A point (or generator) that breaks a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub subject: String,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub evidence: serde_json::Value,
    pub margins: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Certificate {
    /// Verdict is derived from the checks.
    pub fn new(
        kind: CertificateKind,
        subject: impl Into<String>,
        checks: Vec<Check>,
        evidence: serde_json::Value,
        margins: BTreeMap<String, f64>,
        witness: Option<Witness>,
    ) -> Self {
        let verdict = if all_passed(&checks) { Verdict::Pass } else { Verdict::Fail };
        let margins = margins.into_iter().map(|(k, v)| (k, if v.is_finite() { v } else { 0.0 })).collect();
        Self { kind, subject: subject.into(), verdict, checks, evidence, margins, witness }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}
