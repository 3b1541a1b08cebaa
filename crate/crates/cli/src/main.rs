//! `revpref`: fit cost functions to logged decisions and compute the
//! consistency, steering, counterfactual, and sensitivity diagnostics.
//!
//! Subcommands operate on a line-delimited records file (one JSON case per
//! line) plus an optional benchmark catalog; `simulate` generates such
//! files from a synthetic agent, and `parse` decodes raw response text.
//! Failures exit nonzero with a machine-readable error record on stderr.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use revpref::dataset::{load_dataset, save_catalog, save_dataset, DatasetFile};
use revpref::error::Error;
use revpref::model::{CostVector, DecisionRegime};
use revpref::parse::{parse_decision_response_full, parse_probability_response, parse_self_report};
use revpref::report::{emit_report, run_analysis, AnalysisConfig, OutputFormat, ReportBundle};
use revpref::simulate::{simulate_dataset, AgentSpec, BeliefDistribution};

#[derive(Parser)]
#[command(
    name = "revpref",
    version,
    about = "Revealed-preference estimation from decision logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the analysis subcommands.
#[derive(Args)]
struct AnalysisArgs {
    /// Records file, one JSON case per line.
    #[arg(long)]
    input: PathBuf,

    /// Benchmark catalog file (JSON array of {id, c_fp, c_fn, c_defer}).
    /// Defaults to the built-in benchmark grid.
    #[arg(long)]
    catalog: Option<PathBuf>,

    /// Analysis config (JSON). Flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Regimes to analyze (repeatable), e.g. baseline, elicited_p, true_p,
    /// cost:<id>, self_report_global, self_report_case.
    #[arg(long = "regime")]
    regimes: Vec<String>,

    /// Master seed for bootstrap and sensitivity randomness.
    #[arg(long)]
    seed: Option<u64>,

    /// Bootstrap resamples per fitted regime.
    #[arg(long)]
    resamples: Option<usize>,

    /// Directory to write output files into; tables print to stdout when
    /// omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-regime maximum-likelihood fit with bootstrap ratio intervals.
    Fit(AnalysisArgs),
    /// Implied loss-function consistency table.
    Consistency(AnalysisArgs),
    /// Predicted and realized percent loss reductions per benchmark.
    Counterfactual(AnalysisArgs),
    /// Steering progress and classification per benchmark and ratio.
    Steering(AnalysisArgs),
    /// Belief-noise sensitivity sweep.
    Sensitivity {
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Noise standard deviations, ascending and starting at 0.
        #[arg(long, value_delimiter = ',')]
        sds: Option<Vec<f64>>,
        /// Perturb-and-refit repetitions per noise level.
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Full report bundle.
    Report {
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Output format: machine, tables, or figure-data.
        #[arg(long, default_value = "machine")]
        format: String,
    },
    /// Generate a synthetic dataset from a rational agent.
    Simulate {
        /// False-positive cost of the generating agent.
        #[arg(long, default_value_t = 1.0)]
        cost_fp: f64,
        /// False-negative cost of the generating agent.
        #[arg(long, default_value_t = 4.0)]
        cost_fn: f64,
        /// Deferral cost of the generating agent.
        #[arg(long, default_value_t = 0.5)]
        cost_defer: f64,
        /// Softmax noise scale.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Belief distribution: uniform, beta:<alpha>,<beta>, or
        /// grid:<p1>,<p2>,...
        #[arg(long, default_value = "uniform")]
        beliefs: String,
        /// Number of cases.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample actions via explicit Gumbel shocks instead of the
        /// softmax CDF.
        #[arg(long)]
        gumbel: bool,
        /// Records file to write.
        #[arg(long)]
        output: PathBuf,
        /// Also write the built-in benchmark catalog here.
        #[arg(long)]
        catalog_out: Option<PathBuf>,
    },
    /// Parse raw response text into record fields.
    Parse {
        /// Response kind: probability, decision, or self-report.
        #[arg(long)]
        kind: String,
        /// Response text; read from --input or stdin when omitted.
        #[arg(long)]
        text: Option<String>,
        /// File holding the response text.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn load_config(args: &AnalysisArgs) -> Result<AnalysisConfig, Error> {
    let mut config = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => AnalysisConfig::default(),
    };
    if !args.regimes.is_empty() {
        config.regimes = args
            .regimes
            .iter()
            .map(|r| DecisionRegime::from_str(r))
            .collect::<Result<_, _>>()?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(resamples) = args.resamples {
        config.n_resamples = resamples;
    }
    Ok(config)
}

fn load_input(args: &AnalysisArgs) -> Result<DatasetFile, Error> {
    load_dataset(&args.input, args.catalog.as_deref())
}

/// Write `contents` to `<dir>/<name>` when an output directory was given,
/// otherwise print to stdout.
fn deliver(output: &Option<PathBuf>, name: &str, contents: &str) -> Result<(), Error> {
    match output {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, contents)?;
            println!("{}", path.display());
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_belief_distribution(text: &str) -> Result<BeliefDistribution, Error> {
    if text == "uniform" {
        return Ok(BeliefDistribution::Uniform);
    }
    if let Some(params) = text.strip_prefix("beta:") {
        let parts: Vec<&str> = params.split(',').collect();
        if parts.len() == 2 {
            if let (Ok(alpha), Ok(beta)) = (parts[0].parse(), parts[1].parse()) {
                return Ok(BeliefDistribution::BetaShaped { alpha, beta });
            }
        }
        return Err(Error::Parameter(format!(
            "expected beta:<alpha>,<beta>, got '{text}'"
        )));
    }
    if let Some(grid) = text.strip_prefix("grid:") {
        let points: Result<Vec<f64>, _> = grid.split(',').map(str::parse).collect();
        return match points {
            Ok(points) => Ok(BeliefDistribution::FixedGrid(points)),
            Err(_) => Err(Error::Parameter(format!(
                "expected grid:<p1>,<p2>,..., got '{text}'"
            ))),
        };
    }
    Err(Error::Parameter(format!(
        "unknown belief distribution '{text}' (expected uniform, beta:a,b, or grid:p1,p2,...)"
    )))
}

fn read_response_text(text: &Option<String>, input: &Option<PathBuf>) -> Result<String, Error> {
    match (text, input) {
        (Some(text), _) => Ok(text.clone()),
        (None, Some(path)) => Ok(fs::read_to_string(path)?),
        (None, None) => {
            let mut buffer = String::new();
            std::io::stdin().read_to_string(&mut buffer)?;
            Ok(buffer)
        }
    }
}

fn run_report_slice(
    args: &AnalysisArgs,
    file_name: &str,
    slice: impl Fn(&ReportBundle) -> String,
) -> Result<(), Error> {
    let dataset = load_input(args)?;
    let config = load_config(args)?;
    let bundle = run_analysis(&dataset, &config)?;
    deliver(&args.output, file_name, &slice(&bundle))
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Fit(args) => {
            run_report_slice(&args, "fitted_ratios.tsv", |b| b.fitted_ratios_tsv())
        }
        Command::Consistency(args) => run_report_slice(&args, "ilfc.tsv", |b| b.ilfc_tsv()),
        Command::Counterfactual(args) => {
            run_report_slice(&args, "counterfactual.tsv", |b| b.counterfactual_tsv())
        }
        Command::Steering(args) => run_report_slice(&args, "steering.tsv", |b| b.steering_tsv()),
        Command::Sensitivity {
            analysis,
            sds,
            repetitions,
        } => {
            let dataset = load_input(&analysis)?;
            let mut config = load_config(&analysis)?;
            let mut spec = config.sensitivity.take().unwrap_or_default();
            if let Some(sds) = sds {
                spec.noise_sds = sds;
            }
            if let Some(repetitions) = repetitions {
                spec.n_repetitions = repetitions;
            }
            if let Some(seed) = analysis.seed {
                spec.seed = seed;
            }
            config.sensitivity = Some(spec);
            let bundle = run_analysis(&dataset, &config)?;
            deliver(
                &analysis.output,
                "sensitivity.tsv",
                &bundle.sensitivity_tsv(),
            )
        }
        Command::Report { analysis, format } => {
            let format = OutputFormat::from_str(&format)?;
            let dataset = load_input(&analysis)?;
            let config = load_config(&analysis)?;
            let bundle = run_analysis(&dataset, &config)?;
            match &analysis.output {
                Some(dir) => {
                    for path in emit_report(&bundle, format, dir)? {
                        println!("{}", path.display());
                    }
                    Ok(())
                }
                None => {
                    if format == OutputFormat::Machine {
                        println!("{}", serde_json::to_string_pretty(&bundle)?);
                        Ok(())
                    } else {
                        Err(Error::Parameter(
                            "--output is required for tables and figure-data formats".to_string(),
                        ))
                    }
                }
            }
        }
        Command::Simulate {
            cost_fp,
            cost_fn,
            cost_defer,
            beta,
            beliefs,
            n,
            seed,
            gumbel,
            output,
            catalog_out,
        } => {
            let spec = AgentSpec {
                cost: CostVector::new(cost_fp, cost_fn, cost_defer)?,
                beta,
                belief_distribution: parse_belief_distribution(&beliefs)?,
                n_cases: n,
                seed,
                gumbel_shocks: gumbel,
            };
            let records = simulate_dataset(&spec)?;
            save_dataset(&records, &output)?;
            println!("{}", output.display());
            if let Some(path) = catalog_out {
                save_catalog(&revpref::dataset::default_benchmark_catalog(), &path)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Parse { kind, text, input } => {
            let text = read_response_text(&text, &input)?;
            let value = match kind.as_str() {
                "probability" => {
                    let belief = parse_probability_response(&text)?;
                    serde_json::json!({ "p_elicited": belief.value() })
                }
                "decision" => {
                    let decision = parse_decision_response_full(&text)?;
                    serde_json::json!({
                        "action": decision.action().to_string(),
                        "can_decide": decision.can_decide,
                        "forced_choice": decision.forced_choice.to_string(),
                    })
                }
                "self-report" => {
                    let cost = parse_self_report(&text)?;
                    serde_json::json!({
                        "c_fp": cost.c_fp(),
                        "c_fn": cost.c_fn(),
                        "c_defer": cost.c_defer(),
                    })
                }
                other => {
                    return Err(Error::Parameter(format!(
                        "unknown response kind '{other}' (expected probability, decision, or self-report)"
                    )))
                }
            };
            println!("{value}");
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli.command) {
        let record = serde_json::json!({
            "error": {
                "kind": error.kind(),
                "message": error.to_string(),
            }
        });
        eprintln!("{record}");
        std::process::exit(1);
    }
}
