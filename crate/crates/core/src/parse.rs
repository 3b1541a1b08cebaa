//! Parsers for the three raw response formats recorded in elicitation
//! logs: two-line probability reports, two-line decision reports, and
//! three-line self-reported cost functions. Parsers reject anything they
//! cannot map losslessly; there are no silent defaults.

use thiserror::Error;

use crate::error::Result;
use crate::model::{Action, Belief, CostVector};

/// How far the reported No/Yes probabilities may drift from summing to 1
/// before the response is rejected. Reports rounded to two decimals can
/// legitimately sum to 0.99 or 1.01; values inside the tolerance are
/// renormalized by their sum.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("expected {expected} nonempty lines, found {found}")]
    LineCount { expected: usize, found: usize },

    #[error("missing label '{label}'")]
    MissingLabel { label: String },

    #[error("duplicate label '{label}'")]
    DuplicateLabel { label: String },

    #[error("unexpected label '{label}'")]
    UnexpectedLabel { label: String },

    #[error("label '{label}': '{text}' is not a number")]
    NotNumeric { label: String, text: String },

    #[error("label '{label}': value {value} must be {requirement}")]
    OutOfRange {
        label: String,
        value: f64,
        requirement: &'static str,
    },

    #[error("probabilities sum to {sum}, outside tolerance {PROBABILITY_SUM_TOLERANCE} of 1")]
    SumOutOfTolerance { sum: f64 },

    #[error("label '{label}': expected Yes or No, got '{value}'")]
    BadChoice { label: String, value: String },
}

fn nonempty_lines(text: &str) -> Vec<&str> {
    text.lines()
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .collect()
}

fn split_labeled(line: &str) -> Option<(&str, &str)> {
    line.split_once(':')
        .map(|(label, value)| (label.trim(), value.trim()))
}

/// Collect `labels.len()` labeled lines, by label rather than position.
fn read_labeled_values<'a>(
    text: &'a str,
    labels: &[&str],
) -> std::result::Result<Vec<&'a str>, ParseError> {
    let lines = nonempty_lines(text);
    if lines.len() != labels.len() {
        return Err(ParseError::LineCount {
            expected: labels.len(),
            found: lines.len(),
        });
    }
    let mut values: Vec<Option<&str>> = vec![None; labels.len()];
    for line in lines {
        let Some((label, value)) = split_labeled(line) else {
            return Err(ParseError::UnexpectedLabel {
                label: line.to_string(),
            });
        };
        let Some(slot) = labels.iter().position(|&expected| expected == label) else {
            return Err(ParseError::UnexpectedLabel {
                label: label.to_string(),
            });
        };
        if values[slot].is_some() {
            return Err(ParseError::DuplicateLabel {
                label: label.to_string(),
            });
        }
        values[slot] = Some(value);
    }
    for (slot, label) in values.iter().zip(labels) {
        if slot.is_none() {
            return Err(ParseError::MissingLabel {
                label: label.to_string(),
            });
        }
    }
    Ok(values
        .into_iter()
        .map(|v| v.expect("checked above"))
        .collect())
}

fn numeric(label: &str, text: &str) -> std::result::Result<f64, ParseError> {
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ParseError::NotNumeric {
            label: label.to_string(),
            text: text.to_string(),
        })
}

/// Parse a two-line probability report (`No: <p>` / `Yes: <p>`) into the
/// Yes-probability. Values inside the sum tolerance are renormalized by
/// their sum; anything else is rejected.
pub fn parse_probability_response(text: &str) -> Result<Belief> {
    let values = read_labeled_values(text, &["No", "Yes"])?;
    let no = numeric("No", values[0])?;
    let yes = numeric("Yes", values[1])?;
    for (label, value) in [("No", no), ("Yes", yes)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(ParseError::OutOfRange {
                label: label.to_string(),
                value,
                requirement: "a probability in [0, 1]",
            }
            .into());
        }
    }
    let sum = no + yes;
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(ParseError::SumOutOfTolerance { sum }.into());
    }
    Belief::new(yes / sum)
}

/// A parsed two-line decision report. Line 1 ("Can decide") is the only
/// deferral signal; line 2 is the forced choice, retained even when the
/// response defers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionResponse {
    pub can_decide: bool,
    /// The line-2 forced choice: DiagnosePositive or DiagnoseNegative.
    pub forced_choice: Action,
}

impl DecisionResponse {
    /// The recorded action: Defer when the response declined to decide,
    /// otherwise the forced choice.
    pub fn action(&self) -> Action {
        if self.can_decide {
            self.forced_choice
        } else {
            Action::Defer
        }
    }
}

fn yes_no(label: &str, value: &str) -> std::result::Result<bool, ParseError> {
    match value {
        "Yes" => Ok(true),
        "No" => Ok(false),
        other => Err(ParseError::BadChoice {
            label: label.to_string(),
            value: other.to_string(),
        }),
    }
}

/// Parse a two-line decision report, keeping the forced choice.
pub fn parse_decision_response_full(text: &str) -> Result<DecisionResponse> {
    let values = read_labeled_values(text, &["Can decide", "Decision"])?;
    let can_decide = yes_no("Can decide", values[0])?;
    let forced_choice = if yes_no("Decision", values[1])? {
        Action::DiagnosePositive
    } else {
        Action::DiagnoseNegative
    };
    Ok(DecisionResponse {
        can_decide,
        forced_choice,
    })
}

/// Parse a two-line decision report (`Can decide: ...` / `Decision: ...`)
/// into an action: `Can decide: No` maps to Defer, otherwise the decision
/// line picks between the two diagnoses.
pub fn parse_decision_response(text: &str) -> Result<Action> {
    Ok(parse_decision_response_full(text)?.action())
}

/// Parse a three-line self-reported cost function (`False Positive: <n>` /
/// `False Negative: <n>` / `Deferral: <n>`). Lines match by label, not
/// position; negative values are rejected.
pub fn parse_self_report(text: &str) -> Result<CostVector> {
    let labels = ["False Positive", "False Negative", "Deferral"];
    let values = read_labeled_values(text, &labels)?;
    let mut parsed = [0.0; 3];
    for ((slot, label), text) in parsed.iter_mut().zip(labels).zip(values) {
        let value = numeric(label, text)?;
        if value < 0.0 {
            return Err(ParseError::OutOfRange {
                label: label.to_string(),
                value,
                requirement: "nonnegative",
            }
            .into());
        }
        *slot = value;
    }
    CostVector::new(parsed[0], parsed[1], parsed[2])
}
