//! Verification reports shared by every builder and checker.

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Family the check belongs to, e.g. `contact` or `cone`.
    pub group: String,
    pub status: Status,
    /// Nonzero residual or error description on failure.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    /// Error class when the check failed by raising an error.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error_class: Option<String>,
    pub micros: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn push(&mut self, group: &str, name: impl Into<String>, witness: Option<String>, started: Instant) {
        let status = if witness.is_some() { Status::Fail } else { Status::Pass };
        self.checks.push(CheckResult {
            name: name.into(),
            group: group.to_string(),
            status,
            witness,
            error_class: None,
            micros: started.elapsed().as_micros() as u64,
        });
    }

    /// Run `f`, recording a pass when it yields `None` and a failure with the
    /// returned witness otherwise.
    pub fn check(&mut self, group: &str, name: impl Into<String>, f: impl FnOnce() -> Option<String>) {
        let started = Instant::now();
        let witness = f();
        self.push(group, name, witness, started);
    }

    pub fn fail_with_error(&mut self, group: &str, name: impl Into<String>, class: &str, message: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            group: group.to_string(),
            status: Status::Fail,
            witness: Some(message),
            error_class: Some(class.to_string()),
            micros: 0,
        });
    }

    pub fn skip(&mut self, group: &str, name: impl Into<String>, reason: String) {
        self.checks.push(CheckResult {
            name: name.into(),
            group: group.to_string(),
            status: Status::Skipped,
            witness: Some(reason),
            error_class: None,
            micros: 0,
        });
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// Same report with the group prefixed, for nesting sub-reports.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for c in &mut self.checks {
            c.name = format!("{prefix}{}", c.name);
        }
        self
    }
}

/// Error variant name, used as the `error_class` of failed entries.
pub fn error_class(e: &crate::Error) -> &'static str {
    use crate::Error::*;
    match e {
        UnknownGenerator(_) => "UnknownGenerator",
        DuplicateGenerator(_) => "DuplicateGenerator",
        DegreeMismatch { .. } => "DegreeMismatch",
        PresentationMismatch(_) => "PresentationMismatch",
        MasterEquationViolated(_) => "MasterEquationViolated",
        RelativeMasterEquationViolated(_) => "RelativeMasterEquationViolated",
        UnsupportedShift(_) => "UnsupportedShift",
        ShapeMismatch(_) => "ShapeMismatch",
        WeightZero => "WeightZero",
        WeightMismatch(_) => "WeightMismatch",
        PointNotOnClassicalLocus { .. } => "PointNotOnClassicalLocus",
        InvalidPoint(_) => "InvalidPoint",
        DimensionMismatch(_) => "DimensionMismatch",
        NotAChainMap(_) => "NotAChainMap",
        NotAComplex(_) => "NotAComplex",
        DegreeOutOfRange(_) => "DegreeOutOfRange",
        NotClosed(_) => "NotClosed",
        DegenerateAtPoint(_) => "DegenerateAtPoint",
        SyntaxError { .. } => "SyntaxError",
        InvalidOption(_) => "InvalidOption",
        Io { .. } => "Io",
    }
}
