//! Crate-wide error type.

use thiserror::Error;

use crate::parse::ParseError;

/// One validation failure found while loading a dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// 1-based line number in the records file.
    pub line: usize,
    /// Case id, when the line parsed far enough to know it.
    pub case_id: Option<String>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.case_id {
            Some(id) => write!(f, "line {} (case {}): {}", self.line, id, self.message),
            None => write!(f, "line {}: {}", self.line, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,

    #[error("length mismatch between {what}: {left} vs {right}")]
    DimensionMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{field} = {value}: must satisfy {requirement}")]
    Range {
        field: String,
        value: f64,
        requirement: &'static str,
    },

    #[error("cost ratios undefined: c_fp = 0")]
    RatioUndefined,

    #[error("{}missing {what}", .case_id.as_deref().map(|id| format!("case {id}: ")).unwrap_or_default())]
    IncompleteRecord {
        case_id: Option<String>,
        what: String,
    },

    #[error("baseline benchmark loss is zero: percent reduction undefined")]
    UndefinedDenominator,

    #[error("baseline ratio equals the target ratio: steering progress undefined")]
    UndefinedProgress,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("non-finite {what} at iteration {iteration}, point {point:?}")]
    NonFinite {
        what: &'static str,
        iteration: usize,
        point: [f64; 3],
    },

    #[error(transparent)]
    Response(#[from] ParseError),

    #[error("dataset failed validation with {} violation(s):\n{}", .violations.len(), format_violations(.violations))]
    InvalidDataset { violations: Vec<Violation> },

    #[error("integrity: {0}")]
    Integrity(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    /// Attach a human-readable context (regime, benchmark, ...) to an error.
    pub fn in_context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// Stable machine-readable error kind, used by the CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyDataset => "empty_dataset",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Parameter(_) => "parameter",
            Error::Range { .. } => "range",
            Error::RatioUndefined => "ratio_undefined",
            Error::IncompleteRecord { .. } => "incomplete_record",
            Error::UndefinedDenominator => "undefined_denominator",
            Error::UndefinedProgress => "undefined_progress",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::NonFinite { .. } => "non_finite",
            Error::Response(_) => "response_parse",
            Error::InvalidDataset { .. } => "invalid_dataset",
            Error::Integrity(_) => "integrity",
            Error::Context { source, .. } => source.kind(),
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
