//! Error type and named residual checks.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome of one named axiom or compatibility check.
///
/// `residual` is an absolute residual (Frobenius norm for operators) and is
/// always ≥ 0. Checks that do not apply to a backend are recorded with
/// `applicable = false` and count as vacuously passed. `required` marks
/// whether the check participates in the overall pass/fail verdict;
/// informational checks (e.g. metric compatibility, which the construction
/// does not need) carry `required = false`.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub detail: String,
    pub required: bool,
    pub applicable: bool,
}

impl CheckResult {
    pub fn from_residual(name: &str, residual: f64, tol: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: residual <= tol,
            residual,
            detail: String::new(),
            required: true,
            applicable: true,
        }
    }

    pub fn not_applicable(name: &str, detail: &str) -> Self {
        CheckResult {
            name: name.to_string(),
            passed: true,
            residual: 0.0,
            detail: format!("not applicable: {detail}"),
            required: false,
            applicable: false,
        }
    }

    pub fn with_detail(mut self, detail: String) -> Self {
        self.detail = detail;
        self
    }

    pub fn informational(mut self) -> Self {
        self.required = false;
        self
    }
}

/// Ordered list of check results with an overall verdict.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// All required, applicable checks passed.
    pub fn overall(&self) -> bool {
        self.checks
            .iter()
            .filter(|c| c.required && c.applicable)
            .all(|c| c.passed)
    }

    pub fn failed_names(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| c.applicable && !c.passed)
            .map(|c| c.name.clone())
            .collect()
    }
}
