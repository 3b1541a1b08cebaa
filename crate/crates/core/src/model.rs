//! Domain types and decision-theoretic primitives.
//!
//! A decision instance is a binary latent state (condition present or
//! absent), a belief about that state, and a choice among diagnosing
//! positive, diagnosing negative, or deferring. Costs attach to the two
//! error modes and to deferral; everything downstream (estimation,
//! consistency scoring, counterfactuals) is built on the realized-loss /
//! expected-loss / optimal-action trio defined here.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ── Actions and states ──────────────────────────────────────────────────

/// The three available actions. The declared order is the fixed
/// tie-breaking order for argmin over expected losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "yes")]
    DiagnosePositive,
    #[serde(rename = "no")]
    DiagnoseNegative,
    #[serde(rename = "defer")]
    Defer,
}

impl Action {
    /// All actions in tie-breaking order.
    pub const ALL: [Action; 3] = [
        Action::DiagnosePositive,
        Action::DiagnoseNegative,
        Action::Defer,
    ];

    /// Index into per-action triples (expected losses, probabilities).
    pub fn index(self) -> usize {
        match self {
            Action::DiagnosePositive => 0,
            Action::DiagnoseNegative => 1,
            Action::Defer => 2,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::DiagnosePositive => "yes",
            Action::DiagnoseNegative => "no",
            Action::Defer => "defer",
        })
    }
}

impl FromStr for Action {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yes" => Ok(Action::DiagnosePositive),
            "no" => Ok(Action::DiagnoseNegative),
            "defer" => Ok(Action::Defer),
            other => Err(Error::Parameter(format!(
                "unknown action '{other}' (expected yes, no, or defer)"
            ))),
        }
    }
}

/// Whether the condition is truly present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum State {
    Absent,
    Present,
}

impl From<State> for u8 {
    fn from(s: State) -> u8 {
        match s {
            State::Absent => 0,
            State::Present => 1,
        }
    }
}

impl TryFrom<u8> for State {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(State::Absent),
            1 => Ok(State::Present),
            other => Err(format!("state must be 0 or 1, got {other}")),
        }
    }
}

// ── Beliefs ─────────────────────────────────────────────────────────────

/// Probability assigned to `State::Present`. Always finite and in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Belief(f64);

impl Belief {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::Range {
                field: "belief".to_string(),
                value: p,
                requirement: "a finite probability in [0, 1]",
            });
        }
        Ok(Belief(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Belief> for f64 {
    fn from(b: Belief) -> f64 {
        b.0
    }
}

impl TryFrom<f64> for Belief {
    type Error = String;

    fn try_from(p: f64) -> std::result::Result<Self, String> {
        Belief::new(p).map_err(|e| e.to_string())
    }
}

// ── Cost vectors ────────────────────────────────────────────────────────

/// Nonnegative loss weights for the three loss-bearing outcomes:
/// a false positive, a false negative, and a deferral. The object of
/// estimation; only the ratios `c_fn / c_fp` and `c_defer / c_fp` are
/// identified by choice data, so reporting goes through [`CostVector::fn_fp`]
/// and [`CostVector::defer_fp`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct CostVector {
    c_fp: f64,
    c_fn: f64,
    c_defer: f64,
}

impl CostVector {
    pub fn new(c_fp: f64, c_fn: f64, c_defer: f64) -> Result<Self> {
        for (field, value) in [("c_fp", c_fp), ("c_fn", c_fn), ("c_defer", c_defer)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Range {
                    field: field.to_string(),
                    value,
                    requirement: "a finite nonnegative cost",
                });
            }
        }
        Ok(CostVector {
            c_fp,
            c_fn,
            c_defer,
        })
    }

    pub fn c_fp(&self) -> f64 {
        self.c_fp
    }

    pub fn c_fn(&self) -> f64 {
        self.c_fn
    }

    pub fn c_defer(&self) -> f64 {
        self.c_defer
    }

    /// Components in (c_fp, c_fn, c_defer) order.
    pub fn as_array(&self) -> [f64; 3] {
        [self.c_fp, self.c_fn, self.c_defer]
    }

    /// FN/FP ratio; undefined when c_fp = 0.
    pub fn fn_fp(&self) -> Result<f64> {
        if self.c_fp == 0.0 {
            return Err(Error::RatioUndefined);
        }
        Ok(self.c_fn / self.c_fp)
    }

    /// Defer/FP ratio; undefined when c_fp = 0.
    pub fn defer_fp(&self) -> Result<f64> {
        if self.c_fp == 0.0 {
            return Err(Error::RatioUndefined);
        }
        Ok(self.c_defer / self.c_fp)
    }

    /// Both reported ratios as (fn_fp, defer_fp).
    pub fn ratios(&self) -> Result<(f64, f64)> {
        Ok((self.fn_fp()?, self.defer_fp()?))
    }

    /// The cost scaled by a positive factor. Choice behavior is invariant
    /// to joint scaling of costs and the noise scale.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(Error::Parameter(format!(
                "scale factor must be positive and finite, got {factor}"
            )));
        }
        CostVector::new(
            self.c_fp * factor,
            self.c_fn * factor,
            self.c_defer * factor,
        )
    }
}

impl From<CostVector> for [f64; 3] {
    fn from(c: CostVector) -> [f64; 3] {
        c.as_array()
    }
}

impl TryFrom<[f64; 3]> for CostVector {
    type Error = String;

    fn try_from(a: [f64; 3]) -> std::result::Result<Self, String> {
        CostVector::new(a[0], a[1], a[2]).map_err(|e| e.to_string())
    }
}

// ── Regimes and benchmarks ──────────────────────────────────────────────

/// The prompting regime a recorded action was elicited under, plus the two
/// self-report regimes used for consistency scoring. String form (used as
/// map keys in dataset files and in CLI flags): `baseline`, `elicited_p`,
/// `true_p`, `cost:<benchmark_id>`, `self_report_global`, `self_report_case`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DecisionRegime {
    Baseline,
    ElicitedProbPrompt,
    TrueProbPrompt,
    CostFunctionPrompt(String),
    SelfReportGlobal,
    SelfReportCase,
}

impl DecisionRegime {
    /// Regimes under which decisions are actually recorded (the self-report
    /// regimes carry reported cost vectors, not actions).
    pub fn elicits_decisions(&self) -> bool {
        !matches!(
            self,
            DecisionRegime::SelfReportGlobal | DecisionRegime::SelfReportCase
        )
    }
}

impl fmt::Display for DecisionRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecisionRegime::Baseline => f.write_str("baseline"),
            DecisionRegime::ElicitedProbPrompt => f.write_str("elicited_p"),
            DecisionRegime::TrueProbPrompt => f.write_str("true_p"),
            DecisionRegime::CostFunctionPrompt(id) => write!(f, "cost:{id}"),
            DecisionRegime::SelfReportGlobal => f.write_str("self_report_global"),
            DecisionRegime::SelfReportCase => f.write_str("self_report_case"),
        }
    }
}

impl FromStr for DecisionRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(DecisionRegime::Baseline),
            "elicited_p" => Ok(DecisionRegime::ElicitedProbPrompt),
            "true_p" => Ok(DecisionRegime::TrueProbPrompt),
            "self_report_global" => Ok(DecisionRegime::SelfReportGlobal),
            "self_report_case" => Ok(DecisionRegime::SelfReportCase),
            other => match other.strip_prefix("cost:") {
                Some(id) if !id.is_empty() => {
                    Ok(DecisionRegime::CostFunctionPrompt(id.to_string()))
                }
                _ => Err(Error::Parameter(format!("unknown regime key '{other}'"))),
            },
        }
    }
}

impl From<DecisionRegime> for String {
    fn from(r: DecisionRegime) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for DecisionRegime {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse().map_err(|e: Error| e.to_string())
    }
}

/// A benchmark cost tuple supplied in a steering prompt and used to score
/// realized losses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCost {
    pub id: String,
    pub cost: CostVector,
}

// ── Case records ────────────────────────────────────────────────────────

/// One decision instance from an elicitation log: identifiers, beliefs,
/// the realized state when known, the recorded action under each prompting
/// regime, and any self-reported cost vectors or repeated belief elicitations.
///
/// Unknown keys are rejected rather than dropped, so a misspelled field in
/// a log line fails validation instead of silently reading as absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseRecord {
    pub case_id: String,
    pub domain: String,
    pub p_elicited: Belief,
    #[serde(default)]
    pub p_true: Option<Belief>,
    #[serde(default)]
    pub theta: Option<State>,
    #[serde(default)]
    pub actions: BTreeMap<DecisionRegime, Action>,
    #[serde(default)]
    pub self_report_global: Option<CostVector>,
    #[serde(default)]
    pub self_report_case: Option<CostVector>,
    #[serde(default)]
    pub belief_replicates: Option<Vec<Belief>>,
}

impl CaseRecord {
    /// The recorded action under `regime`, or an incomplete-record error
    /// naming this case.
    pub fn action_under(&self, regime: &DecisionRegime) -> Result<Action> {
        self.actions
            .get(regime)
            .copied()
            .ok_or_else(|| Error::IncompleteRecord {
                case_id: Some(self.case_id.clone()),
                what: format!("action under regime '{regime}'"),
            })
    }

    /// The realized state, or an incomplete-record error.
    pub fn theta_required(&self) -> Result<State> {
        self.theta.ok_or_else(|| Error::IncompleteRecord {
            case_id: Some(self.case_id.clone()),
            what: "theta".to_string(),
        })
    }

    /// The ground-truth belief, or an incomplete-record error.
    pub fn p_true_required(&self) -> Result<Belief> {
        self.p_true.ok_or_else(|| Error::IncompleteRecord {
            case_id: Some(self.case_id.clone()),
            what: "p_true".to_string(),
        })
    }
}

// ── Decision primitives ─────────────────────────────────────────────────

/// Loss realized by taking `action` when the true state is `state`:
/// c_fp for a false positive, c_fn for a false negative, c_defer for any
/// deferral, and zero for a correct diagnosis.
pub fn realized_loss(cost: &CostVector, action: Action, state: State) -> f64 {
    match (action, state) {
        (Action::DiagnosePositive, State::Absent) => cost.c_fp(),
        (Action::DiagnoseNegative, State::Present) => cost.c_fn(),
        (Action::Defer, _) => cost.c_defer(),
        _ => 0.0,
    }
}

/// Expected loss of `action` under belief `p` on the positive state:
/// c_fp·(1−p) for diagnosing positive, c_fn·p for diagnosing negative,
/// c_defer for deferring.
pub fn expected_loss(cost: &CostVector, belief: Belief, action: Action) -> f64 {
    let p = belief.value();
    match action {
        Action::DiagnosePositive => cost.c_fp() * (1.0 - p),
        Action::DiagnoseNegative => cost.c_fn() * p,
        Action::Defer => cost.c_defer(),
    }
}

/// Expected losses for all three actions, in [`Action::ALL`] order.
pub fn expected_losses(cost: &CostVector, belief: Belief) -> [f64; 3] {
    let p = belief.value();
    [cost.c_fp() * (1.0 - p), cost.c_fn() * p, cost.c_defer()]
}

/// The action minimizing expected loss under `belief`. Exact ties go to the
/// earliest action in [`Action::ALL`] order.
pub fn optimal_action(cost: &CostVector, belief: Belief) -> Action {
    let losses = expected_losses(cost, belief);
    let mut best = Action::DiagnosePositive;
    let mut best_loss = losses[0];
    for action in [Action::DiagnoseNegative, Action::Defer] {
        let loss = losses[action.index()];
        if loss < best_loss {
            best = action;
            best_loss = loss;
        }
    }
    best
}

/// Total realized loss of a decision vector against realized states, scored
/// under the benchmark's cost vector.
pub fn total_benchmark_loss(
    benchmark: &BenchmarkCost,
    actions: &[Action],
    states: &[State],
) -> Result<f64> {
    if actions.len() != states.len() {
        return Err(Error::DimensionMismatch {
            what: "actions and states",
            left: actions.len(),
            right: states.len(),
        });
    }
    if actions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(actions
        .iter()
        .zip(states)
        .map(|(&a, &s)| realized_loss(&benchmark.cost, a, s))
        .sum())
}
