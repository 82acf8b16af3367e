//! JSON documents emitted by the verification suites and the CLI.

use serde::Serialize;

use crate::complex_core::Tolerance;
use crate::SCHEMA;

/// At most this many failures are listed per check.
pub const MAX_LISTED_FAILURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub check: String,
    pub sample: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub samples: usize,
    pub threshold: f64,
    pub max_residual: f64,
    /// Extremes of the observed quantity, for checks that record one (Levi
    /// eigenvalues, sheet counts).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_value: Option<f64>,
    pub failures: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_residual: f64,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
    pub failures: Vec<Failure>,
}

impl SuiteReport {
    pub fn new(suite: &str, tol: &Tolerance, checks: Vec<CheckReport>, failures: Vec<Failure>) -> Self {
        let max_residual = checks
            .iter()
            .map(|c| c.max_residual)
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) });
        Self {
            schema: SCHEMA,
            suite: suite.to_string(),
            seed: tol.seed,
            samples: tol.samples,
            abs_tol: tol.abs_tol,
            rel_tol: tol.rel_tol,
            max_residual,
            passed: checks.iter().all(|c| c.passed),
            checks,
            failures,
        }
    }

    /// Merges several suite reports into one (used by `verify all`).
    pub fn merge(suite: &str, tol: &Tolerance, parts: Vec<SuiteReport>) -> Self {
        let mut checks = Vec::new();
        let mut failures = Vec::new();
        for p in parts {
            checks.extend(p.checks.into_iter().map(|mut c| {
                c.name = format!("{}/{}", p.suite, c.name);
                c
            }));
            failures.extend(p.failures.into_iter().map(|mut f| {
                f.check = format!("{}/{}", p.suite, f.check);
                f
            }));
        }
        Self::new(suite, tol, checks, failures)
    }
}

/// Wraps a command result with the schema tag, seed and tolerances.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema: &'static str,
    pub command: String,
    pub seed: u64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: &str, tol: &Tolerance, result: T) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            seed: tol.seed,
            abs_tol: tol.abs_tol,
            rel_tol: tol.rel_tol,
            result,
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types always serialize");
    s.push('\n');
    s
}
