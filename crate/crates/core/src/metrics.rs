//! Downstream diagnostics: implied loss-function consistency, predicted
//! and realized percent loss reductions under benchmark costs, directed
//! steering progress with classification, Pearson correlation, and RMSD
//! between elicited-probability sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    optimal_action, total_benchmark_loss, Action, Belief, BenchmarkCost, CaseRecord, CostVector,
    DecisionRegime, State,
};

// ── Types ───────────────────────────────────────────────────────────────

/// Which belief object an analysis reads off each case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefSource {
    Elicited,
    True,
}

impl BeliefSource {
    pub fn belief_of(self, record: &CaseRecord) -> Result<Belief> {
        match self {
            BeliefSource::Elicited => Ok(record.p_elicited),
            BeliefSource::True => record.p_true_required(),
        }
    }
}

impl std::fmt::Display for BeliefSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BeliefSource::Elicited => "elicited",
            BeliefSource::True => "true",
        })
    }
}

/// Direction-of-steering classification bands over the progress value:
/// `Wrong` below 0, `Under` in [0, 0.8), `Target` in [0.8, 1.2],
/// `Over` above 1.2. The bands partition the finite reals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SteeringClass {
    Wrong,
    Under,
    Target,
    Over,
}

impl std::fmt::Display for SteeringClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SteeringClass::Wrong => "wrong",
            SteeringClass::Under => "under",
            SteeringClass::Target => "target",
            SteeringClass::Over => "over",
        })
    }
}

/// Predicted and realized percent loss reductions under one benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualReport {
    pub benchmark_id: String,
    /// Reduction from swapping in the intervention's target component
    /// (benchmark cost, or ground-truth beliefs) while holding the other
    /// component fixed.
    pub target_prediction: f64,
    /// Reduction from swapping in the post-prompt implied components.
    pub steered_prediction: f64,
    /// Reduction realized by the recorded post-prompt decisions.
    pub realized_effect: f64,
}

/// Which self-reported cost vector scores a case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfReportScope {
    Global,
    Case,
}

// ── Consistency ─────────────────────────────────────────────────────────

fn ilfc_with_costs<'a>(
    cases: &'a [CaseRecord],
    regime: &DecisionRegime,
    belief_source: BeliefSource,
    cost_of: impl Fn(&'a CaseRecord) -> Result<&'a CostVector>,
) -> Result<f64> {
    if cases.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut hits = 0usize;
    for case in cases {
        let action = case.action_under(regime)?;
        let belief = belief_source.belief_of(case)?;
        if action == optimal_action(cost_of(case)?, belief) {
            hits += 1;
        }
    }
    Ok(100.0 * hits as f64 / cases.len() as f64)
}

/// Implied loss-function consistency: the percentage of cases whose
/// recorded action under `regime` equals the expected-loss-minimizing
/// action under the chosen belief and `cost`.
pub fn ilfc(
    cases: &[CaseRecord],
    regime: &DecisionRegime,
    belief_source: BeliefSource,
    cost: &CostVector,
) -> Result<f64> {
    ilfc_with_costs(cases, regime, belief_source, |_| Ok(cost))
}

/// Consistency of recorded decisions with each case's own self-reported
/// cost vector. The action regime names where the decisions come from
/// (typically baseline: self-report prompts elicit no decision of their
/// own); the scope picks the global or case-specific report.
pub fn ilfc_self_report(
    cases: &[CaseRecord],
    action_regime: &DecisionRegime,
    belief_source: BeliefSource,
    scope: SelfReportScope,
) -> Result<f64> {
    ilfc_with_costs(cases, action_regime, belief_source, |case| {
        let (report, what) = match scope {
            SelfReportScope::Global => (&case.self_report_global, "self_report_global"),
            SelfReportScope::Case => (&case.self_report_case, "self_report_case"),
        };
        report.as_ref().ok_or_else(|| Error::IncompleteRecord {
            case_id: Some(case.case_id.clone()),
            what: what.to_string(),
        })
    })
}

// ── Counterfactual and realized reductions ──────────────────────────────

fn percent_reduction(baseline_loss: f64, new_loss: f64) -> Result<f64> {
    if baseline_loss == 0.0 {
        return Err(Error::UndefinedDenominator);
    }
    // Divide before scaling so the no-change and total-elimination cases
    // come out exactly 0 and 100.
    Ok(100.0 * ((baseline_loss - new_loss) / baseline_loss))
}

/// Percent reduction in total benchmark loss when decisions simulated from
/// `(from_cost, from_beliefs)` are replaced by decisions simulated from
/// `(to_cost, to_beliefs)`, both via the optimal-action rule, scored
/// against the realized states.
pub fn counterfactual_reduction(
    benchmark: &BenchmarkCost,
    from_cost: &CostVector,
    from_beliefs: &[Belief],
    to_cost: &CostVector,
    to_beliefs: &[Belief],
    states: &[State],
) -> Result<f64> {
    if from_beliefs.len() != to_beliefs.len() {
        return Err(Error::DimensionMismatch {
            what: "baseline and counterfactual beliefs",
            left: from_beliefs.len(),
            right: to_beliefs.len(),
        });
    }
    let from_actions: Vec<Action> = from_beliefs
        .iter()
        .map(|&b| optimal_action(from_cost, b))
        .collect();
    let to_actions: Vec<Action> = to_beliefs
        .iter()
        .map(|&b| optimal_action(to_cost, b))
        .collect();
    let baseline_loss = total_benchmark_loss(benchmark, &from_actions, states)?;
    let new_loss = total_benchmark_loss(benchmark, &to_actions, states)?;
    percent_reduction(baseline_loss, new_loss)
}

/// Percent reduction in total benchmark loss from recorded baseline
/// decisions to recorded post-prompt decisions.
pub fn realized_reduction(
    benchmark: &BenchmarkCost,
    baseline_actions: &[Action],
    prompted_actions: &[Action],
    states: &[State],
) -> Result<f64> {
    if baseline_actions.len() != prompted_actions.len() {
        return Err(Error::DimensionMismatch {
            what: "baseline and prompted actions",
            left: baseline_actions.len(),
            right: prompted_actions.len(),
        });
    }
    let baseline_loss = total_benchmark_loss(benchmark, baseline_actions, states)?;
    let new_loss = total_benchmark_loss(benchmark, prompted_actions, states)?;
    percent_reduction(baseline_loss, new_loss)
}

// ── Steering progress ───────────────────────────────────────────────────

/// Directed baseline-relative progress of a ratio toward its target on
/// log2 scale: with b = log2(baseline/true) and l = log2(steered/true),
/// returns sign(b)·(b − l)/|b|. 0 means no movement, 1 exact recovery,
/// negative movement away from the target, above 1 overshoot.
pub fn steering_progress(baseline_ratio: f64, steered_ratio: f64, true_ratio: f64) -> Result<f64> {
    for (name, value) in [
        ("baseline_ratio", baseline_ratio),
        ("steered_ratio", steered_ratio),
        ("true_ratio", true_ratio),
    ] {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::Range {
                field: name.to_string(),
                value,
                requirement: "a finite ratio > 0",
            });
        }
    }
    let b = (baseline_ratio / true_ratio).log2();
    if b == 0.0 {
        return Err(Error::UndefinedProgress);
    }
    let l = (steered_ratio / true_ratio).log2();
    Ok(b.signum() * (b - l) / b.abs())
}

/// Band classification of a progress value.
pub fn classify_steering(progress: f64) -> Result<SteeringClass> {
    if !progress.is_finite() {
        return Err(Error::Parameter(format!(
            "progress must be finite, got {progress}"
        )));
    }
    Ok(if progress < 0.0 {
        SteeringClass::Wrong
    } else if progress < 0.8 {
        SteeringClass::Under
    } else if progress <= 1.2 {
        SteeringClass::Target
    } else {
        SteeringClass::Over
    })
}

// ── Correlation and RMSD ────────────────────────────────────────────────

/// Sample Pearson correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            what: "correlation inputs",
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "correlation needs at least 2 observations, got {}",
            x.len()
        )));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mean_x;
        let dy = yi - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput(
            "correlation undefined for zero-variance input".to_string(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Root mean squared deviation between two equal-length belief vectors.
pub fn rmsd(p_a: &[Belief], p_b: &[Belief]) -> Result<f64> {
    if p_a.len() != p_b.len() {
        return Err(Error::DimensionMismatch {
            what: "belief vectors",
            left: p_a.len(),
            right: p_b.len(),
        });
    }
    if p_a.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sum_sq: f64 = p_a
        .iter()
        .zip(p_b)
        .map(|(a, b)| {
            let d = a.value() - b.value();
            d * d
        })
        .sum();
    Ok((sum_sq / p_a.len() as f64).sqrt())
}
