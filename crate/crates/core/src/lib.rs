//! Revealed-preference estimation for decisions under uncertainty.
//!
//! Given logged decision instances (an elicited probability of the
//! positive state plus the action chosen under one or more prompting
//! regimes), this crate fits the cost function (false-positive,
//! false-negative, and deferral weights) that best rationalizes the
//! decisions under a multinomial-logit choice model, and computes the
//! downstream diagnostics built on that fit:
//!
//! - implied loss-function consistency (how often recorded decisions match
//!   the expected-loss-minimizing action),
//! - counterfactual and realized percent loss reductions under benchmark
//!   cost functions,
//! - directed steering progress of the implied cost ratios toward a
//!   prompted target, with band classification,
//! - bootstrap confidence intervals, Pearson correlations, RMSD between
//!   probability elicitations, and Gaussian belief-noise sensitivity.
//!
//! A built-in synthetic rational agent ([`simulate`]) generates datasets
//! from known cost vectors, serving as the end-to-end oracle for the
//! estimator. The [`dataset`] module reads and writes line-delimited
//! record logs, [`parse`] decodes raw response text, and [`report`] runs
//! the full analysis and emits machine-readable, tabular, or figure-ready
//! output.

pub mod dataset;
pub mod error;
pub mod estimator;
pub mod metrics;
pub mod model;
pub mod parse;
pub mod report;
pub mod simulate;

pub use error::{Error, Result};
pub use model::{
    expected_loss, expected_losses, optimal_action, realized_loss, total_benchmark_loss, Action,
    Belief, BenchmarkCost, CaseRecord, CostVector, DecisionRegime, State,
};

pub use estimator::{
    bootstrap_ratios, choice_probabilities, fit_mle, log_likelihood, log_likelihood_gradient,
    BootstrapIntervals, FitOptions, FitResult, RatioInterval, RatioName,
};

pub use metrics::{
    classify_steering, counterfactual_reduction, ilfc, ilfc_self_report, pearson_r,
    realized_reduction, rmsd, steering_progress, BeliefSource, CounterfactualReport,
    SelfReportScope, SteeringClass,
};

pub use simulate::{
    average_beliefs, noise_sensitivity, perturb_beliefs, simulate_dataset, AgentSpec,
    BeliefDistribution, SensitivitySpec, SensitivityTable,
};

pub use dataset::{
    default_benchmark_catalog, load_catalog, load_dataset, save_dataset, DatasetFile,
};

pub use parse::{
    parse_decision_response, parse_probability_response, parse_self_report, ParseError,
};

pub use report::{emit_report, run_analysis, AnalysisConfig, OutputFormat, ReportBundle};
