//! End-to-end analysis and report emission.
//!
//! [`run_analysis`] fits a cost vector per prompting regime, bootstraps
//! interval estimates, scores consistency, and builds the steering,
//! counterfactual, and noise-sensitivity tables. Its output is a pure
//! function of (dataset, config): per-regime bootstrap seeds derive from
//! the config seed, tables are assembled in deterministic order, and
//! serialization is byte-stable regardless of evaluation parallelism.
//!
//! [`emit_report`] writes the bundle as a machine-readable JSON document,
//! delimited tables (numbers at 6 significant digits), or figure-ready
//! (x, y, group) tuples at full double precision.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetFile;
use crate::error::{Error, Result};
use crate::estimator::{
    bootstrap_ratios, fit_mle, FitOptions, FitResult, RatioInterval, RatioName,
    DEFAULT_BOOTSTRAP_RESAMPLES,
};
use crate::metrics::{
    classify_steering, counterfactual_reduction, ilfc, ilfc_self_report, realized_reduction,
    steering_progress, BeliefSource, CounterfactualReport, SelfReportScope, SteeringClass,
};
use crate::model::{Action, Belief, CostVector, DecisionRegime, State};
use crate::simulate::{fitting_view, noise_sensitivity, SensitivitySpec, SensitivityTable};

// ── Configuration ───────────────────────────────────────────────────────

/// What to analyze and how. Mirrors the CLI's `--config` JSON document;
/// every field has a default, so `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    /// Regimes to fit and score. Self-report regimes contribute
    /// consistency rows only, scored against baseline actions with each
    /// case's own reported cost vector.
    pub regimes: Vec<DecisionRegime>,
    /// Per-regime belief-source overrides. Unlisted regimes default to the
    /// ground-truth belief for the true-probability prompt and the
    /// elicited belief everywhere else.
    pub belief_sources: BTreeMap<DecisionRegime, BeliefSource>,
    /// Benchmark ids for the steering and counterfactual tables. `None`
    /// selects every benchmark referenced by the dataset's actions.
    pub benchmarks: Option<Vec<String>>,
    pub n_resamples: usize,
    pub fit: FitOptions,
    /// When set, a belief-noise sensitivity sweep runs per decision regime.
    pub sensitivity: Option<SensitivitySpec>,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            regimes: vec![DecisionRegime::Baseline],
            belief_sources: BTreeMap::new(),
            benchmarks: None,
            n_resamples: DEFAULT_BOOTSTRAP_RESAMPLES,
            fit: FitOptions::default(),
            sensitivity: None,
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn belief_source_for(&self, regime: &DecisionRegime) -> BeliefSource {
        self.belief_sources
            .get(regime)
            .copied()
            .unwrap_or(match regime {
                DecisionRegime::TrueProbPrompt => BeliefSource::True,
                _ => BeliefSource::Elicited,
            })
    }
}

// ── Bundle types ────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedRatioRow {
    pub regime: DecisionRegime,
    pub belief_source: BeliefSource,
    pub n_cases: usize,
    pub fit: FitResult,
    pub fn_fp: RatioInterval,
    pub defer_fp: RatioInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlfcRow {
    /// The scored regime (names the cost source).
    pub regime: DecisionRegime,
    /// Where the compared actions come from; differs from `regime` for the
    /// self-report rows, which score baseline decisions.
    pub action_regime: DecisionRegime,
    pub belief_source: BeliefSource,
    pub n_cases: usize,
    pub ilfc: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub wrong: usize,
    pub under: usize,
    pub target: usize,
    pub over: usize,
}

impl ClassCounts {
    fn add(&mut self, class: SteeringClass) {
        match class {
            SteeringClass::Wrong => self.wrong += 1,
            SteeringClass::Under => self.under += 1,
            SteeringClass::Target => self.target += 1,
            SteeringClass::Over => self.over += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringRow {
    pub benchmark_id: String,
    pub ratio_name: RatioName,
    pub n_cases: usize,
    pub baseline_ratio: f64,
    pub steered_ratio: f64,
    pub true_ratio: f64,
    /// Absent when the baseline already equals the target (progress
    /// undefined); such rows are excluded from the class counts.
    pub progress: Option<f64>,
    pub class: Option<SteeringClass>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringTable {
    pub rows: Vec<SteeringRow>,
    /// Pooled counts over all defined rows, (wrong, under, target, over).
    pub class_counts: ClassCounts,
    /// Rows excluded for undefined progress.
    pub n_excluded: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intervention {
    /// Cost-function prompting: benchmark cost swapped in, beliefs fixed.
    Cost,
    /// Probability prompting: ground-truth beliefs swapped in.
    Prob,
}

impl std::fmt::Display for Intervention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Intervention::Cost => "cost",
            Intervention::Prob => "prob",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualRow {
    pub benchmark_id: String,
    pub intervention: Intervention,
    pub n_cases: usize,
    /// Absent when a zero-loss baseline makes a reduction undefined; the
    /// exclusion reason says which quantity was affected.
    pub report: Option<CounterfactualReport>,
    pub exclusion: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualTable {
    pub rows: Vec<CounterfactualRow>,
    /// Rows excluded for undefined denominators.
    pub n_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityEntry {
    pub regime: DecisionRegime,
    pub table: SensitivityTable,
}

/// Everything [`run_analysis`] produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub n_cases: usize,
    pub config: AnalysisConfig,
    pub fitted_ratios: Vec<FittedRatioRow>,
    pub ilfc_table: Vec<IlfcRow>,
    pub steering_table: SteeringTable,
    pub counterfactual_table: CounterfactualTable,
    pub sensitivity_tables: Vec<SensitivityEntry>,
}

impl ReportBundle {
    /// The fitted-ratio table as TSV, numbers at 6 significant digits.
    pub fn fitted_ratios_tsv(&self) -> String {
        let mut out = String::from(
            "regime\tbelief_source\tn_cases\tfn_fp\tfn_fp_lower_95\tfn_fp_upper_95\tdefer_fp\tdefer_fp_lower_95\tdefer_fp_upper_95\tn_resamples\tn_boundary_resamples\tconverged\tat_boundary\tlog_likelihood\n",
        );
        for row in &self.fitted_ratios {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.regime,
                row.belief_source,
                row.n_cases,
                sig6(row.fn_fp.point),
                sig6(row.fn_fp.lower_95),
                sig6(row.fn_fp.upper_95),
                sig6(row.defer_fp.point),
                sig6(row.defer_fp.lower_95),
                sig6(row.defer_fp.upper_95),
                row.fn_fp.n_resamples,
                row.fn_fp.n_boundary_resamples,
                row.fit.converged,
                row.fit.any_boundary(),
                sig6(row.fit.log_likelihood),
            ));
        }
        out
    }

    /// The consistency table as TSV.
    pub fn ilfc_tsv(&self) -> String {
        let mut out = String::from("regime\taction_regime\tbelief_source\tn_cases\tilfc\n");
        for row in &self.ilfc_table {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                row.regime,
                row.action_regime,
                row.belief_source,
                row.n_cases,
                sig6(row.ilfc),
            ));
        }
        out
    }

    /// The steering table as TSV, with a trailing class-count line.
    pub fn steering_tsv(&self) -> String {
        let mut out =
            String::from("benchmark\tratio\tn_cases\tbaseline\tsteered\ttrue\tprogress\tclass\n");
        for row in &self.steering_table.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.benchmark_id,
                row.ratio_name,
                row.n_cases,
                sig6(row.baseline_ratio),
                sig6(row.steered_ratio),
                sig6(row.true_ratio),
                opt_sig6(row.progress),
                row.class
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "excluded".to_string()),
            ));
        }
        let counts = self.steering_table.class_counts;
        out.push_str(&format!(
            "# class_counts\twrong={}\tunder={}\ttarget={}\tover={}\texcluded={}\n",
            counts.wrong, counts.under, counts.target, counts.over, self.steering_table.n_excluded,
        ));
        out
    }

    /// The counterfactual table as TSV.
    pub fn counterfactual_tsv(&self) -> String {
        let mut out = String::from(
            "benchmark\tintervention\tn_cases\ttarget_prediction\tsteered_prediction\trealized_effect\texclusion\n",
        );
        for row in &self.counterfactual_table.rows {
            let (target, steered, realized) = match &row.report {
                Some(r) => (
                    sig6(r.target_prediction),
                    sig6(r.steered_prediction),
                    sig6(r.realized_effect),
                ),
                None => ("-".to_string(), "-".to_string(), "-".to_string()),
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                row.benchmark_id,
                row.intervention,
                row.n_cases,
                target,
                steered,
                realized,
                row.exclusion.as_deref().unwrap_or("-"),
            ));
        }
        out
    }

    /// The sensitivity table as TSV.
    pub fn sensitivity_tsv(&self) -> String {
        let mut out = String::from(
            "regime\tsd\tn_repetitions\tfn_fp_median_pct\tfn_fp_lower_95\tfn_fp_upper_95\tdefer_fp_median_pct\tdefer_fp_lower_95\tdefer_fp_upper_95\tbaseline_at_bound\n",
        );
        for entry in &self.sensitivity_tables {
            for row in &entry.table.rows {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    entry.regime,
                    sig6(row.sd),
                    row.n_repetitions,
                    sig6(row.fn_fp.median_pct_change),
                    sig6(row.fn_fp.band_lower_95),
                    sig6(row.fn_fp.band_upper_95),
                    sig6(row.defer_fp.median_pct_change),
                    sig6(row.defer_fp.band_lower_95),
                    sig6(row.defer_fp.band_upper_95),
                    entry.table.baseline_denominator_at_bound,
                ));
            }
        }
        out
    }
}

// ── Analysis ────────────────────────────────────────────────────────────

/// Process-stable string hash for deriving per-regime seeds.
fn fnv1a64(text: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for byte in text.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

struct RegimeFit {
    n_cases: usize,
    fit: FitResult,
    fn_fp: RatioInterval,
    defer_fp: RatioInterval,
}

fn fit_regime(
    dataset: &DatasetFile,
    config: &AnalysisConfig,
    regime: &DecisionRegime,
) -> Result<RegimeFit> {
    let context = format!("regime '{regime}'");
    let source = config.belief_source_for(regime);
    let view = fitting_view(
        &dataset.records,
        regime,
        matches!(source, BeliefSource::True),
    )
    .map_err(|e| e.in_context(context.clone()))?;
    let fit = fit_mle(&view, &config.fit).map_err(|e| e.in_context(context.clone()))?;
    let seed = crate::simulate::derive_seed(config.seed, fnv1a64(&regime.to_string()), 0);
    let intervals = bootstrap_ratios(&view, &config.fit, config.n_resamples, seed)
        .map_err(|e| e.in_context(context))?;
    Ok(RegimeFit {
        n_cases: view.len(),
        fit,
        fn_fp: intervals.fn_fp,
        defer_fp: intervals.defer_fp,
    })
}

/// Run the full analysis over a validated dataset.
///
/// Fits per-regime cost vectors with bootstrap intervals, scores implied
/// loss-function consistency (including self-report rows against baseline
/// decisions), and, when benchmarks are in play, the steering-progress
/// and counterfactual tables, which require baseline actions and realized
/// states on every record. Undefined-progress and undefined-denominator
/// cells are excluded and counted rather than invented; missing record
/// fields are hard errors naming the case.
pub fn run_analysis(dataset: &DatasetFile, config: &AnalysisConfig) -> Result<ReportBundle> {
    config.fit.validate()?;
    if let Some(spec) = &config.sensitivity {
        spec.validate()?;
    }
    if dataset.records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if config.regimes.is_empty() {
        return Err(Error::Parameter(
            "config must name at least one regime".to_string(),
        ));
    }

    // Benchmarks under analysis.
    let selected: Vec<String> = match &config.benchmarks {
        Some(ids) => {
            for id in ids {
                dataset.benchmark(id)?;
            }
            ids.clone()
        }
        None => dataset.referenced_benchmark_ids(),
    };

    // Every regime whose decisions get fitted: the configured decision
    // regimes, plus baseline and the steered regimes backing the benchmark
    // tables.
    let mut fit_regimes: Vec<DecisionRegime> = config
        .regimes
        .iter()
        .filter(|r| r.elicits_decisions())
        .cloned()
        .collect();
    if !selected.is_empty() {
        for id in &selected {
            fit_regimes.push(DecisionRegime::CostFunctionPrompt(id.clone()));
        }
        fit_regimes.push(DecisionRegime::Baseline);
    }
    fit_regimes.sort();
    fit_regimes.dedup();

    let mut fits: BTreeMap<DecisionRegime, RegimeFit> = BTreeMap::new();
    for regime in &fit_regimes {
        fits.insert(regime.clone(), fit_regime(dataset, config, regime)?);
    }

    // Fitted-ratio rows, in config order.
    let mut fitted_ratios = Vec::new();
    for regime in config.regimes.iter().filter(|r| r.elicits_decisions()) {
        let fit = &fits[regime];
        fitted_ratios.push(FittedRatioRow {
            regime: regime.clone(),
            belief_source: config.belief_source_for(regime),
            n_cases: fit.n_cases,
            fit: fit.fit.clone(),
            fn_fp: fit.fn_fp.clone(),
            defer_fp: fit.defer_fp.clone(),
        });
    }

    // Consistency rows.
    let mut ilfc_table = Vec::new();
    for regime in &config.regimes {
        let source = config.belief_source_for(regime);
        let context = format!("ilfc for regime '{regime}'");
        let (action_regime, score) = match regime {
            DecisionRegime::SelfReportGlobal => (
                DecisionRegime::Baseline,
                ilfc_self_report(
                    &dataset.records,
                    &DecisionRegime::Baseline,
                    source,
                    SelfReportScope::Global,
                ),
            ),
            DecisionRegime::SelfReportCase => (
                DecisionRegime::Baseline,
                ilfc_self_report(
                    &dataset.records,
                    &DecisionRegime::Baseline,
                    source,
                    SelfReportScope::Case,
                ),
            ),
            decision_regime => (
                decision_regime.clone(),
                ilfc(
                    &dataset.records,
                    decision_regime,
                    source,
                    &fits[decision_regime].fit.cost,
                ),
            ),
        };
        ilfc_table.push(IlfcRow {
            regime: regime.clone(),
            action_regime,
            belief_source: source,
            n_cases: dataset.records.len(),
            ilfc: score.map_err(|e| e.in_context(context))?,
        });
    }

    // Steering and counterfactual tables.
    let mut steering_table = SteeringTable {
        rows: Vec::new(),
        class_counts: ClassCounts::default(),
        n_excluded: 0,
    };
    let mut counterfactual_table = CounterfactualTable {
        rows: Vec::new(),
        n_excluded: 0,
    };

    if !selected.is_empty() {
        let baseline = &fits[&DecisionRegime::Baseline];
        let baseline_cost = baseline.fit.cost;
        let (baseline_fn_fp, baseline_defer_fp) = baseline_cost
            .ratios()
            .map_err(|e| e.in_context("baseline fit"))?;

        let n = dataset.records.len();
        let states: Vec<State> = dataset
            .records
            .iter()
            .map(|r| r.theta_required())
            .collect::<Result<_>>()
            .map_err(|e| e.in_context("counterfactual analysis"))?;
        let elicited: Vec<Belief> = dataset.records.iter().map(|r| r.p_elicited).collect();
        let baseline_actions: Vec<Action> = dataset
            .records
            .iter()
            .map(|r| r.action_under(&DecisionRegime::Baseline))
            .collect::<Result<_>>()?;

        // Probability-prompt rows ride along when the true-probability
        // regime is part of the analysis.
        let prob_prompt = config
            .regimes
            .contains(&DecisionRegime::TrueProbPrompt)
            .then(|| -> Result<(Vec<Belief>, Vec<Action>, CostVector)> {
                let p_true: Vec<Belief> = dataset
                    .records
                    .iter()
                    .map(|r| r.p_true_required())
                    .collect::<Result<_>>()?;
                let actions: Vec<Action> = dataset
                    .records
                    .iter()
                    .map(|r| r.action_under(&DecisionRegime::TrueProbPrompt))
                    .collect::<Result<_>>()?;
                Ok((
                    p_true,
                    actions,
                    fits[&DecisionRegime::TrueProbPrompt].fit.cost,
                ))
            })
            .transpose()
            .map_err(|e| e.in_context("probability-prompt counterfactuals"))?;

        for id in &selected {
            let benchmark = dataset.benchmark(id)?;
            let context = format!("benchmark '{id}'");
            let steered_regime = DecisionRegime::CostFunctionPrompt(id.clone());
            let steered = &fits[&steered_regime];
            let steered_cost = steered.fit.cost;
            let (steered_fn_fp, steered_defer_fp) = steered_cost
                .ratios()
                .map_err(|e| e.in_context(context.clone()))?;
            let (true_fn_fp, true_defer_fp) = benchmark
                .cost
                .ratios()
                .map_err(|e| e.in_context(context.clone()))?;

            for (ratio_name, baseline_ratio, steered_ratio, true_ratio) in [
                (RatioName::FnFp, baseline_fn_fp, steered_fn_fp, true_fn_fp),
                (
                    RatioName::DeferFp,
                    baseline_defer_fp,
                    steered_defer_fp,
                    true_defer_fp,
                ),
            ] {
                let (progress, class) =
                    match steering_progress(baseline_ratio, steered_ratio, true_ratio) {
                        Ok(progress) => {
                            let class = classify_steering(progress)
                                .map_err(|e| e.in_context(context.clone()))?;
                            steering_table.class_counts.add(class);
                            (Some(progress), Some(class))
                        }
                        Err(Error::UndefinedProgress) => {
                            steering_table.n_excluded += 1;
                            (None, None)
                        }
                        Err(e) => return Err(e.in_context(context.clone())),
                    };
                steering_table.rows.push(SteeringRow {
                    benchmark_id: id.clone(),
                    ratio_name,
                    n_cases: steered.n_cases,
                    baseline_ratio,
                    steered_ratio,
                    true_ratio,
                    progress,
                    class,
                });
            }

            // Cost-prompt counterfactual row.
            let steered_actions: Vec<Action> = dataset
                .records
                .iter()
                .map(|r| r.action_under(&steered_regime))
                .collect::<Result<_>>()
                .map_err(|e| e.in_context(context.clone()))?;
            let quantities = (|| -> Result<CounterfactualReport> {
                Ok(CounterfactualReport {
                    benchmark_id: id.clone(),
                    target_prediction: counterfactual_reduction(
                        benchmark,
                        &baseline_cost,
                        &elicited,
                        &benchmark.cost,
                        &elicited,
                        &states,
                    )?,
                    steered_prediction: counterfactual_reduction(
                        benchmark,
                        &baseline_cost,
                        &elicited,
                        &steered_cost,
                        &elicited,
                        &states,
                    )?,
                    realized_effect: realized_reduction(
                        benchmark,
                        &baseline_actions,
                        &steered_actions,
                        &states,
                    )?,
                })
            })();
            counterfactual_table.rows.push(match quantities {
                Ok(report) => CounterfactualRow {
                    benchmark_id: id.clone(),
                    intervention: Intervention::Cost,
                    n_cases: n,
                    report: Some(report),
                    exclusion: None,
                },
                Err(Error::UndefinedDenominator) => {
                    counterfactual_table.n_excluded += 1;
                    CounterfactualRow {
                        benchmark_id: id.clone(),
                        intervention: Intervention::Cost,
                        n_cases: n,
                        report: None,
                        exclusion: Some("zero baseline benchmark loss".to_string()),
                    }
                }
                Err(e) => return Err(e.in_context(context.clone())),
            });

            // Probability-prompt counterfactual row.
            if let Some((p_true, prob_actions, prob_cost)) = &prob_prompt {
                let quantities = (|| -> Result<CounterfactualReport> {
                    Ok(CounterfactualReport {
                        benchmark_id: id.clone(),
                        target_prediction: counterfactual_reduction(
                            benchmark,
                            &baseline_cost,
                            &elicited,
                            &baseline_cost,
                            p_true,
                            &states,
                        )?,
                        steered_prediction: counterfactual_reduction(
                            benchmark,
                            &baseline_cost,
                            &elicited,
                            prob_cost,
                            p_true,
                            &states,
                        )?,
                        realized_effect: realized_reduction(
                            benchmark,
                            &baseline_actions,
                            prob_actions,
                            &states,
                        )?,
                    })
                })();
                counterfactual_table.rows.push(match quantities {
                    Ok(report) => CounterfactualRow {
                        benchmark_id: id.clone(),
                        intervention: Intervention::Prob,
                        n_cases: n,
                        report: Some(report),
                        exclusion: None,
                    },
                    Err(Error::UndefinedDenominator) => {
                        counterfactual_table.n_excluded += 1;
                        CounterfactualRow {
                            benchmark_id: id.clone(),
                            intervention: Intervention::Prob,
                            n_cases: n,
                            report: None,
                            exclusion: Some("zero baseline benchmark loss".to_string()),
                        }
                    }
                    Err(e) => return Err(e.in_context(context)),
                });
            }
        }
    }

    // Belief-noise sensitivity per decision regime.
    let mut sensitivity_tables = Vec::new();
    if let Some(spec) = &config.sensitivity {
        for regime in config.regimes.iter().filter(|r| r.elicits_decisions()) {
            let context = format!("sensitivity for regime '{regime}'");
            let source = config.belief_source_for(regime);
            let view = fitting_view(
                &dataset.records,
                regime,
                matches!(source, BeliefSource::True),
            )
            .map_err(|e| e.in_context(context.clone()))?;
            let mut regime_spec = spec.clone();
            regime_spec.seed =
                crate::simulate::derive_seed(spec.seed, fnv1a64(&regime.to_string()), 1);
            let table = noise_sensitivity(&view, &regime_spec, &config.fit)
                .map_err(|e| e.in_context(context))?;
            sensitivity_tables.push(SensitivityEntry {
                regime: regime.clone(),
                table,
            });
        }
    }

    Ok(ReportBundle {
        n_cases: dataset.records.len(),
        config: config.clone(),
        fitted_ratios,
        ilfc_table,
        steering_table,
        counterfactual_table,
        sensitivity_tables,
    })
}

// ── Emission ────────────────────────────────────────────────────────────

/// Report output formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// One JSON document with the whole bundle.
    Machine,
    /// Tab-separated tables, one file per bundle table.
    Tables,
    /// (x, y, group) tuples for the progress plot and the
    /// predicted-versus-realized scatter, at full double precision.
    FigureData,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "machine" => Ok(OutputFormat::Machine),
            "tables" => Ok(OutputFormat::Tables),
            "figure-data" => Ok(OutputFormat::FigureData),
            other => Err(Error::Parameter(format!(
                "unknown format '{other}' (expected machine, tables, or figure-data)"
            ))),
        }
    }
}

/// Format a number to 6 significant digits, the precision used for all
/// printed numeric output.
pub fn sig6(value: f64) -> String {
    format_significant(value, 6)
}

fn format_significant(value: f64, digits: i32) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return value.to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    if magnitude >= digits || magnitude < -4 {
        format!("{value:.*e}", (digits - 1) as usize)
    } else {
        format!("{value:.*}", (digits - 1 - magnitude).max(0) as usize)
    }
}

fn opt_sig6(value: Option<f64>) -> String {
    value.map(sig6).unwrap_or_else(|| "-".to_string())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn tables_files(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    Ok(vec![
        write_file(dir, "fitted_ratios.tsv", &bundle.fitted_ratios_tsv())?,
        write_file(dir, "ilfc.tsv", &bundle.ilfc_tsv())?,
        write_file(dir, "steering.tsv", &bundle.steering_tsv())?,
        write_file(dir, "counterfactual.tsv", &bundle.counterfactual_tsv())?,
        write_file(dir, "sensitivity.tsv", &bundle.sensitivity_tsv())?,
    ])
}

fn figure_files(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();

    // Progress plot: x = directed progress, y = the benchmark's true
    // ratio (the grouping axis in the movement figure), group = ratio kind.
    let mut out = String::from("x\ty\tgroup\tbenchmark\n");
    for row in &bundle.steering_table.rows {
        if let Some(progress) = row.progress {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                progress, row.true_ratio, row.ratio_name, row.benchmark_id,
            ));
        }
    }
    files.push(write_file(dir, "figure_steering_progress.tsv", &out)?);

    // Predicted-versus-realized scatter: one point per (row, prediction
    // kind), grouped by intervention and prediction kind.
    let mut out = String::from("x\ty\tgroup\tbenchmark\n");
    for row in &bundle.counterfactual_table.rows {
        if let Some(report) = &row.report {
            out.push_str(&format!(
                "{}\t{}\t{}:target\t{}\n",
                report.target_prediction,
                report.realized_effect,
                row.intervention,
                row.benchmark_id,
            ));
            out.push_str(&format!(
                "{}\t{}\t{}:steered\t{}\n",
                report.steered_prediction,
                report.realized_effect,
                row.intervention,
                row.benchmark_id,
            ));
        }
    }
    files.push(write_file(dir, "figure_counterfactual.tsv", &out)?);

    Ok(files)
}

/// Write the bundle to `dir` in the requested format, returning the paths
/// written. Output bytes are a pure function of the bundle.
pub fn emit_report(
    bundle: &ReportBundle,
    format: OutputFormat,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    match format {
        OutputFormat::Machine => {
            let mut contents = serde_json::to_string_pretty(bundle)?;
            contents.push('\n');
            Ok(vec![write_file(dir, "report.json", &contents)?])
        }
        OutputFormat::Tables => tables_files(bundle, dir),
        OutputFormat::FigureData => figure_files(bundle, dir),
    }
}
