use std::fmt;

use thiserror::Error;

/// One violated invariant: which field, what value it held, and why it was rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub value: String,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.reason)
    }
}

/// Every invariant violation found in one validation pass.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl ValidationError {
    pub(crate) fn push(&mut self, field: &str, value: impl fmt::Display, reason: &str) {
        self.violations.push(Violation {
            field: field.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        });
    }

    pub fn has_field(&self, field: &str) -> bool {
        self.violations.iter().any(|v| v.field == field)
    }

    pub(crate) fn into_result<T>(self, ok: T) -> Result<T, ValidationError> {
        if self.violations.is_empty() {
            Ok(ok)
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invalid setting(s)", self.violations.len())?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation failed: {0}")]
    Validation(#[from] ValidationError),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: estimated error {achieved:e} vs target {requested:e} at depth {depth}"
    )]
    NonConvergence {
        achieved: f64,
        requested: f64,
        depth: usize,
    },

    #[error("trajectory step failed at x = {x:e} m, y = {y:e} m (step {step:e} m)")]
    StepFailure { x: f64, y: f64, step: f64 },

    #[error("empty deviation profile")]
    EmptyProfile,

    #[error("{}", parse_message(.line, .key, .message))]
    Parse {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_message(line: &Option<usize>, key: &Option<String>, message: &str) -> String {
    let mut out = String::from("config parse error");
    if let Some(line) = line {
        out.push_str(&format!(" at line {line}"));
    }
    if let Some(key) = key {
        out.push_str(&format!(" (key `{key}`)"));
    }
    out.push_str(": ");
    out.push_str(message);
    out
}

impl Error {
    /// Process exit code for the CLI: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Parse { .. } | Error::Io(_) => 1,
            Error::Domain(_)
            | Error::NonConvergence { .. }
            | Error::StepFailure { .. }
            | Error::EmptyProfile => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
