//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

/// One checked matrix identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity_name: String,
    pub passed: bool,
    pub max_abs_deviation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, deviation: f64) {
        self.checks.push(IdentityCheck {
            identity_name: name.into(),
            passed,
            max_abs_deviation: deviation,
        });
    }

    /// Record an identity that must hold with the given deviation bound.
    pub fn expect_at_most(&mut self, name: impl Into<String>, deviation: f64, bound: f64) {
        self.push(name, deviation <= bound, deviation);
    }

    /// Record an identity that must fail: the deviation has to exceed `bound`.
    pub fn expect_violation(&mut self, name: impl Into<String>, deviation: f64, bound: f64) {
        self.push(name, deviation > bound, deviation);
    }

    pub fn extend(&mut self, other: IdentityReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.identity_name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// value <= threshold
    AtMost,
    /// value >= threshold
    AtLeast,
    /// only reported
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub bound: Bound,
    pub passed: bool,
}

/// Residuals of a numerical check, each with the threshold it was held to.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub title: String,
    pub entries: Vec<ResidualEntry>,
    /// Free-form findings, e.g. which sign convention satisfied a check.
    pub findings: Vec<String>,
}

impl ResidualReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn at_most(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            threshold,
            bound: Bound::AtMost,
            passed: value <= threshold,
        });
    }

    pub fn at_least(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            threshold,
            bound: Bound::AtLeast,
            passed: value >= threshold,
        });
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push(ResidualEntry {
            name: name.into(),
            value,
            threshold: 0.0,
            bound: Bound::Info,
            passed: true,
        });
    }

    pub fn finding(&mut self, text: impl Into<String>) {
        self.findings.push(text.into());
    }

    pub fn merge(&mut self, other: ResidualReport) {
        self.entries.extend(other.entries);
        self.findings.extend(other.findings);
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    pub fn entry(&self, name: &str) -> Option<&ResidualEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}
