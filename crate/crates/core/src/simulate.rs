//! Synthetic rational-agent generation and belief-perturbation studies.
//!
//! The simulator is the ground-truth oracle for the estimator: it draws
//! beliefs, samples states from those beliefs, and samples actions from
//! the same softmax choice model the estimator fits, so generating ratios
//! are recoverable by construction. Also houses the Gaussian belief-noise
//! sensitivity sweep and belief-replicate averaging.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gumbel, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{choice_probabilities, fit_mle, FitOptions};
use crate::model::{
    expected_losses, Action, Belief, CaseRecord, CostVector, DecisionRegime, State,
};

// ── Specs ───────────────────────────────────────────────────────────────

/// Belief distribution for synthetic cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefDistribution {
    /// Uniform on [0, 1].
    Uniform,
    /// Beta(alpha, beta).
    BetaShaped { alpha: f64, beta: f64 },
    /// Cases cycle through the listed beliefs in order.
    FixedGrid(Vec<f64>),
}

impl BeliefDistribution {
    fn validate(&self) -> Result<()> {
        match self {
            BeliefDistribution::Uniform => Ok(()),
            BeliefDistribution::BetaShaped { alpha, beta } => {
                if !(alpha.is_finite() && *alpha > 0.0 && beta.is_finite() && *beta > 0.0) {
                    return Err(Error::Parameter(format!(
                        "beta-shaped distribution requires positive finite parameters, got ({alpha}, {beta})"
                    )));
                }
                Ok(())
            }
            BeliefDistribution::FixedGrid(grid) => {
                if grid.is_empty() {
                    return Err(Error::Parameter("fixed grid must be nonempty".to_string()));
                }
                for &p in grid {
                    Belief::new(p)?;
                }
                Ok(())
            }
        }
    }
}

/// Generating process for a synthetic agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    pub cost: CostVector,
    pub beta: f64,
    pub belief_distribution: BeliefDistribution,
    pub n_cases: usize,
    pub seed: u64,
    /// Sample actions via explicit Gumbel utility shocks instead of the
    /// softmax CDF. Distributionally identical; kept for cross-validating
    /// the equivalence.
    #[serde(default)]
    pub gumbel_shocks: bool,
}

impl AgentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_cases == 0 {
            return Err(Error::Parameter("n_cases must be >= 1".to_string()));
        }
        if self.beta <= 0.0 || !self.beta.is_finite() {
            return Err(Error::Parameter(format!(
                "beta must be positive and finite, got {}",
                self.beta
            )));
        }
        self.belief_distribution.validate()
    }
}

/// Grid and repetition count for the belief-noise sensitivity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySpec {
    /// Ascending noise standard deviations; must start at 0 (the control).
    pub noise_sds: Vec<f64>,
    pub n_repetitions: usize,
    pub seed: u64,
}

impl Default for SensitivitySpec {
    fn default() -> Self {
        SensitivitySpec {
            noise_sds: vec![0.0, 0.01, 0.02, 0.05, 0.10, 0.20],
            n_repetitions: 20,
            seed: 0,
        }
    }
}

impl SensitivitySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_repetitions == 0 {
            return Err(Error::Parameter("n_repetitions must be >= 1".to_string()));
        }
        if self.noise_sds.first() != Some(&0.0) {
            return Err(Error::Parameter(
                "noise_sds must include 0 as the first (control) point".to_string(),
            ));
        }
        for window in self.noise_sds.windows(2) {
            if window[0].partial_cmp(&window[1]) != Some(std::cmp::Ordering::Less) {
                return Err(Error::Parameter(
                    "noise_sds must be strictly ascending".to_string(),
                ));
            }
        }
        for &sd in &self.noise_sds {
            if !sd.is_finite() || sd < 0.0 {
                return Err(Error::Parameter(format!(
                    "noise sd must be finite and >= 0, got {sd}"
                )));
            }
        }
        Ok(())
    }
}

// ── Seed derivation ─────────────────────────────────────────────────────

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic sub-seed for task (a, b) under a master seed.
pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(seed ^ splitmix64(a) ^ splitmix64(b).rotate_left(32))
}

// ── Simulation ──────────────────────────────────────────────────────────

enum BeliefSampler {
    Uniform,
    BetaShaped(Beta<f64>),
    FixedGrid(Vec<f64>),
}

impl BeliefSampler {
    fn build(dist: &BeliefDistribution) -> Result<Self> {
        Ok(match dist {
            BeliefDistribution::Uniform => BeliefSampler::Uniform,
            BeliefDistribution::BetaShaped { alpha, beta } => BeliefSampler::BetaShaped(
                Beta::new(*alpha, *beta)
                    .map_err(|e| Error::Parameter(format!("beta-shaped distribution: {e}")))?,
            ),
            BeliefDistribution::FixedGrid(grid) => BeliefSampler::FixedGrid(grid.clone()),
        })
    }

    fn draw(&self, index: usize, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            BeliefSampler::Uniform => rng.random::<f64>(),
            BeliefSampler::BetaShaped(beta) => beta.sample(rng).clamp(0.0, 1.0),
            BeliefSampler::FixedGrid(grid) => grid[index % grid.len()],
        }
    }
}

fn sample_action_softmax(probs: &[f64; 3], rng: &mut ChaCha8Rng) -> Action {
    let u = rng.random::<f64>();
    let mut acc = 0.0;
    for action in Action::ALL {
        acc += probs[action.index()];
        if u < acc {
            return action;
        }
    }
    Action::Defer
}

fn sample_action_gumbel(
    cost: &CostVector,
    belief: Belief,
    beta: f64,
    gumbel: &Gumbel<f64>,
    rng: &mut ChaCha8Rng,
) -> Action {
    // argmin over perturbed losses l_a − beta·g_a is distributed as the
    // softmax over −l_a / beta.
    let losses = expected_losses(cost, belief);
    let mut best = Action::DiagnosePositive;
    let mut best_value = f64::INFINITY;
    for action in Action::ALL {
        let value = losses[action.index()] - beta * gumbel.sample(rng);
        if value < best_value {
            best = action;
            best_value = value;
        }
    }
    best
}

/// Generate a synthetic dataset: per case, draw a belief, sample the state
/// from that belief (the agent is calibrated by construction), and sample
/// the action from the softmax choice model. Records carry the drawn
/// belief as both `p_elicited` and `p_true` and file their action under
/// the baseline regime. Fully deterministic given the seed.
pub fn simulate_dataset(spec: &AgentSpec) -> Result<Vec<CaseRecord>> {
    spec.validate()?;
    let sampler = BeliefSampler::build(&spec.belief_distribution)?;
    let gumbel =
        Gumbel::new(0.0, 1.0).map_err(|e| Error::Parameter(format!("gumbel distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut records = Vec::with_capacity(spec.n_cases);
    for index in 0..spec.n_cases {
        let p = sampler.draw(index, &mut rng);
        let belief = Belief::new(p)?;
        let theta = if rng.random_bool(p) {
            State::Present
        } else {
            State::Absent
        };
        let action = if spec.gumbel_shocks {
            sample_action_gumbel(&spec.cost, belief, spec.beta, &gumbel, &mut rng)
        } else {
            let probs = choice_probabilities(&spec.cost, belief, spec.beta)?;
            sample_action_softmax(&probs, &mut rng)
        };
        let mut actions = std::collections::BTreeMap::new();
        actions.insert(DecisionRegime::Baseline, action);
        records.push(CaseRecord {
            case_id: format!("sim-{index:06}"),
            domain: "synthetic".to_string(),
            p_elicited: belief,
            p_true: Some(belief),
            theta: Some(theta),
            actions,
            self_report_global: None,
            self_report_case: None,
            belief_replicates: None,
        });
    }
    Ok(records)
}

// ── Belief perturbation ─────────────────────────────────────────────────

/// Add independent Gaussian noise (standard deviation `sd`) to each belief
/// and clip back to [0, 1]. `sd = 0` returns the input unchanged.
pub fn perturb_beliefs(beliefs: &[Belief], sd: f64, seed: u64) -> Result<Vec<Belief>> {
    if !sd.is_finite() || sd < 0.0 {
        return Err(Error::Parameter(format!(
            "noise sd must be finite and >= 0, got {sd}"
        )));
    }
    if sd == 0.0 {
        return Ok(beliefs.to_vec());
    }
    let normal =
        Normal::new(0.0, sd).map_err(|e| Error::Parameter(format!("gaussian noise: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    beliefs
        .iter()
        .map(|b| Belief::new((b.value() + normal.sample(&mut rng)).clamp(0.0, 1.0)))
        .collect()
}

/// Arithmetic mean of the first `k` belief replicates.
pub fn average_beliefs(replicates: &[Belief], k: usize) -> Result<Belief> {
    if k == 0 {
        return Err(Error::Parameter("k must be >= 1".to_string()));
    }
    if replicates.len() < k {
        return Err(Error::IncompleteRecord {
            case_id: None,
            what: format!("{k} belief replicates (found {})", replicates.len()),
        });
    }
    let mean = replicates[..k].iter().map(|b| b.value()).sum::<f64>() / k as f64;
    Belief::new(mean.clamp(0.0, 1.0))
}

// ── Noise sensitivity ───────────────────────────────────────────────────

/// Summary of ratio movement at one noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySummary {
    pub median_pct_change: f64,
    /// 95% bootstrap band for the median, over repetitions.
    pub band_lower_95: f64,
    pub band_upper_95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub sd: f64,
    pub n_repetitions: usize,
    pub fn_fp: SensitivitySummary,
    pub defer_fp: SensitivitySummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub rows: Vec<SensitivityRow>,
    /// The unperturbed fit pinned c_fp at a bound; percent changes are
    /// still reported against the bounded ratio.
    pub baseline_denominator_at_bound: bool,
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    median_sorted(&sorted)
}

const BAND_RESAMPLES: usize = 1000;
const BAND_TAG: u64 = 0x5eed_badd_0000_0001;

/// 95% percentile bootstrap band for the median of `values`.
fn median_band(values: &[f64], seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = values.len();
    let mut medians = Vec::with_capacity(BAND_RESAMPLES);
    let mut scratch = vec![0.0; n];
    for _ in 0..BAND_RESAMPLES {
        for slot in scratch.iter_mut() {
            *slot = values[rng.random_range(0..n)];
        }
        medians.push(median(&scratch));
    }
    medians.sort_by(f64::total_cmp);
    let q = |q: f64| {
        let h = q * (medians.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(medians.len() - 1);
        medians[lo] + (h - lo as f64) * (medians[hi] - medians[lo])
    };
    (q(0.025), q(0.975))
}

/// Perturb-and-refit sweep: for each noise sd and repetition, perturb the
/// dataset's beliefs, refit, and record the absolute percent change of each
/// reported ratio against the unperturbed fit; rows report the median
/// across repetitions with bootstrap bands. Per-(sd, repetition) noise
/// streams derive from the master seed, so the table is reproducible and
/// independent of evaluation parallelism.
pub fn noise_sensitivity(
    dataset: &[(Belief, Action)],
    spec: &SensitivitySpec,
    options: &FitOptions,
) -> Result<SensitivityTable> {
    spec.validate()?;
    let base_fit = fit_mle(dataset, options)?;
    let (base_fn_fp, base_defer_fp) = base_fit.cost.ratios()?;
    let baseline_denominator_at_bound = base_fit.boundary_flags[0];

    let beliefs: Vec<Belief> = dataset.iter().map(|&(b, _)| b).collect();
    let actions: Vec<Action> = dataset.iter().map(|&(_, a)| a).collect();

    let mut refit_options = options.clone();
    refit_options.initial_cost = base_fit.cost;

    let tasks: Vec<(usize, usize)> = (0..spec.noise_sds.len())
        .flat_map(|sd_index| (0..spec.n_repetitions).map(move |rep| (sd_index, rep)))
        .collect();

    let outcomes: Vec<Result<(f64, f64)>> = tasks
        .par_iter()
        .map(|&(sd_index, rep)| {
            let sd = spec.noise_sds[sd_index];
            let noise_seed = derive_seed(spec.seed, sd_index as u64, rep as u64);
            let perturbed = perturb_beliefs(&beliefs, sd, noise_seed)?;
            let refit_data: Vec<(Belief, Action)> =
                perturbed.into_iter().zip(actions.iter().copied()).collect();
            let fit = fit_mle(&refit_data, &refit_options)?;
            let (fn_fp, defer_fp) = fit.cost.ratios()?;
            Ok((
                (fn_fp - base_fn_fp).abs() / base_fn_fp * 100.0,
                (defer_fp - base_defer_fp).abs() / base_defer_fp * 100.0,
            ))
        })
        .collect();

    let mut changes: Vec<(f64, f64)> = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        changes.push(outcome?);
    }

    let mut rows = Vec::with_capacity(spec.noise_sds.len());
    for (sd_index, &sd) in spec.noise_sds.iter().enumerate() {
        let start = sd_index * spec.n_repetitions;
        let block = &changes[start..start + spec.n_repetitions];
        let fn_changes: Vec<f64> = block.iter().map(|&(f, _)| f).collect();
        let defer_changes: Vec<f64> = block.iter().map(|&(_, d)| d).collect();
        let fn_band = median_band(
            &fn_changes,
            derive_seed(spec.seed, sd_index as u64, BAND_TAG),
        );
        let defer_band = median_band(
            &defer_changes,
            derive_seed(spec.seed, sd_index as u64, BAND_TAG.wrapping_add(1)),
        );
        rows.push(SensitivityRow {
            sd,
            n_repetitions: spec.n_repetitions,
            fn_fp: SensitivitySummary {
                median_pct_change: median(&fn_changes),
                band_lower_95: fn_band.0,
                band_upper_95: fn_band.1,
            },
            defer_fp: SensitivitySummary {
                median_pct_change: median(&defer_changes),
                band_lower_95: defer_band.0,
                band_upper_95: defer_band.1,
            },
        });
    }

    Ok(SensitivityTable {
        rows,
        baseline_denominator_at_bound,
    })
}

/// The (belief, action) view of records under one regime, the shape the
/// estimator consumes.
pub fn fitting_view(
    records: &[CaseRecord],
    regime: &DecisionRegime,
    use_true_beliefs: bool,
) -> Result<Vec<(Belief, Action)>> {
    records
        .iter()
        .map(|record| {
            let belief = if use_true_beliefs {
                record.p_true_required()?
            } else {
                record.p_elicited
            };
            Ok((belief, record.action_under(regime)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::optimal_action;

    fn cost(fp: f64, fnn: f64, d: f64) -> CostVector {
        CostVector::new(fp, fnn, d).unwrap()
    }

    fn spec(cost: CostVector, beta: f64, n: usize, seed: u64) -> AgentSpec {
        AgentSpec {
            cost,
            beta,
            belief_distribution: BeliefDistribution::Uniform,
            n_cases: n,
            seed,
            gumbel_shocks: false,
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let s = spec(cost(1.0, 4.0, 0.5), 1.0, 200, 99);
        assert_eq!(simulate_dataset(&s).unwrap(), simulate_dataset(&s).unwrap());
    }

    #[test]
    fn near_zero_beta_reproduces_optimal_actions() {
        let c = cost(1.0, 4.0, 0.5);
        // Decision boundaries for this cost sit at p = 0.125 and p = 0.5.
        let grid: Vec<f64> = (0..200)
            .map(|i| i as f64 / 199.0)
            .filter(|p| (p - 0.125).abs() > 1e-3 && (p - 0.5).abs() > 1e-3)
            .collect();
        let s = AgentSpec {
            cost: c,
            beta: 1e-9,
            belief_distribution: BeliefDistribution::FixedGrid(grid),
            n_cases: 400,
            seed: 5,
            gumbel_shocks: false,
        };
        for record in simulate_dataset(&s).unwrap() {
            let expected = optimal_action(&c, record.p_elicited);
            assert_eq!(record.actions[&DecisionRegime::Baseline], expected);
        }
    }

    #[test]
    fn action_frequencies_match_choice_probabilities() {
        let c = cost(1.0, 1.0, 0.5);
        let s = AgentSpec {
            cost: c,
            beta: 1.0,
            belief_distribution: BeliefDistribution::FixedGrid(vec![0.5]),
            n_cases: 100_000,
            seed: 11,
            gumbel_shocks: false,
        };
        let records = simulate_dataset(&s).unwrap();
        let probs = choice_probabilities(&c, Belief::new(0.5).unwrap(), 1.0).unwrap();
        let mut counts = [0usize; 3];
        for record in &records {
            counts[record.actions[&DecisionRegime::Baseline].index()] += 1;
        }
        for (count, p) in counts.iter().zip(probs) {
            let freq = *count as f64 / records.len() as f64;
            assert!(
                (freq - p).abs() < 0.01,
                "frequency {freq} vs probability {p}"
            );
        }
    }

    #[test]
    fn gumbel_path_matches_softmax_distribution() {
        let c = cost(1.0, 2.0, 0.4);
        let base = AgentSpec {
            cost: c,
            beta: 1.0,
            belief_distribution: BeliefDistribution::FixedGrid(vec![0.35]),
            n_cases: 60_000,
            seed: 21,
            gumbel_shocks: false,
        };
        let gumbel = AgentSpec {
            gumbel_shocks: true,
            seed: 22,
            ..base.clone()
        };
        let count = |records: &[CaseRecord]| {
            let mut counts = [0usize; 3];
            for r in records {
                counts[r.actions[&DecisionRegime::Baseline].index()] += 1;
            }
            counts.map(|c| c as f64 / records.len() as f64)
        };
        let f_softmax = count(&simulate_dataset(&base).unwrap());
        let f_gumbel = count(&simulate_dataset(&gumbel).unwrap());
        for (a, b) in f_softmax.iter().zip(&f_gumbel) {
            assert!((a - b).abs() < 0.015, "softmax {a} vs gumbel {b}");
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut s = spec(cost(1.0, 1.0, 1.0), 1.0, 0, 1);
        assert!(simulate_dataset(&s).is_err());
        s.n_cases = 10;
        s.beta = 0.0;
        assert!(simulate_dataset(&s).is_err());
        s.beta = 1.0;
        s.belief_distribution = BeliefDistribution::BetaShaped {
            alpha: -1.0,
            beta: 2.0,
        };
        assert!(simulate_dataset(&s).is_err());
        s.belief_distribution = BeliefDistribution::FixedGrid(vec![]);
        assert!(simulate_dataset(&s).is_err());
    }

    #[test]
    fn perturb_zero_sd_is_identity() {
        let beliefs: Vec<Belief> = (0..20)
            .map(|i| Belief::new(i as f64 / 19.0).unwrap())
            .collect();
        assert_eq!(perturb_beliefs(&beliefs, 0.0, 3).unwrap(), beliefs);
    }

    #[test]
    fn perturb_clips_into_unit_interval() {
        let beliefs = vec![Belief::new(0.0).unwrap(); 200];
        let out = perturb_beliefs(&beliefs, 0.3, 4).unwrap();
        assert!(out.iter().all(|b| (0.0..=1.0).contains(&b.value())));
        assert!(perturb_beliefs(&beliefs, -0.1, 4).is_err());
    }

    #[test]
    fn perturb_mean_absolute_shift_tracks_half_normal() {
        // Interior beliefs, small sd: E|shift| = sd * sqrt(2/pi) ~ 0.0399.
        let beliefs = vec![Belief::new(0.5).unwrap(); 50_000];
        let out = perturb_beliefs(&beliefs, 0.05, 8).unwrap();
        let mean_shift: f64 =
            out.iter().map(|b| (b.value() - 0.5).abs()).sum::<f64>() / out.len() as f64;
        assert!(
            (mean_shift - 0.05 * (2.0 / std::f64::consts::PI).sqrt()).abs() < 0.002,
            "mean absolute shift {mean_shift}"
        );
    }

    #[test]
    fn averaging_beliefs() {
        let reps: Vec<Belief> = [0.2, 0.4, 0.6, 0.8, 1.0]
            .iter()
            .map(|&p| Belief::new(p).unwrap())
            .collect();
        assert_eq!(average_beliefs(&reps, 5).unwrap().value(), 0.6);
        assert_eq!(average_beliefs(&reps, 1).unwrap().value(), 0.2);
        assert!(matches!(
            average_beliefs(&reps, 6),
            Err(Error::IncompleteRecord { .. })
        ));
        assert!(average_beliefs(&reps, 0).is_err());
    }

    #[test]
    fn averaged_replicates_move_ratios_less_than_single_noisy_beliefs() {
        // Variance-reduction check: refitting on 5-replicate averages at
        // noise sd 0.05 moves the ratios less than refitting on one noisy
        // replicate.
        let c = cost(1.0, 4.0, 0.5);
        let records = simulate_dataset(&spec(c, 1.0, 1500, 31)).unwrap();
        let data = fitting_view(&records, &DecisionRegime::Baseline, false).unwrap();
        let options = FitOptions::default();
        let base = fit_mle(&data, &options).unwrap();
        let (base_fn, _) = base.cost.ratios().unwrap();

        let beliefs: Vec<Belief> = data.iter().map(|&(b, _)| b).collect();
        let actions: Vec<Action> = data.iter().map(|&(_, a)| a).collect();
        let replicates: Vec<Vec<Belief>> = (0..5)
            .map(|r| perturb_beliefs(&beliefs, 0.05, 1000 + r).unwrap())
            .collect();

        let refit_ratio = |beliefs: &[Belief]| {
            let d: Vec<(Belief, Action)> = beliefs
                .iter()
                .copied()
                .zip(actions.iter().copied())
                .collect();
            fit_mle(&d, &options).unwrap().cost.ratios().unwrap().0
        };

        let single = refit_ratio(&replicates[0]);
        let averaged: Vec<Belief> = (0..beliefs.len())
            .map(|i| {
                let reps: Vec<Belief> = replicates.iter().map(|r| r[i]).collect();
                average_beliefs(&reps, 5).unwrap()
            })
            .collect();
        let avg = refit_ratio(&averaged);

        let single_change = (single - base_fn).abs() / base_fn;
        let avg_change = (avg - base_fn).abs() / base_fn;
        assert!(
            avg_change < single_change,
            "averaged change {avg_change} should undercut single-replicate change {single_change}"
        );
    }

    #[test]
    fn sensitivity_control_row_is_exactly_zero() {
        let c = cost(1.0, 4.0, 0.5);
        let records = simulate_dataset(&spec(c, 1.0, 400, 17)).unwrap();
        let data = fitting_view(&records, &DecisionRegime::Baseline, false).unwrap();
        let sens_spec = SensitivitySpec {
            noise_sds: vec![0.0, 0.05],
            n_repetitions: 4,
            seed: 2,
        };
        let table = noise_sensitivity(&data, &sens_spec, &FitOptions::default()).unwrap();
        assert_eq!(table.rows[0].fn_fp.median_pct_change, 0.0);
        assert_eq!(table.rows[0].defer_fp.median_pct_change, 0.0);
        assert!(table.rows[1].fn_fp.median_pct_change >= 0.0);
        assert!(!table.baseline_denominator_at_bound);
    }

    #[test]
    fn sensitivity_is_reproducible() {
        let c = cost(1.0, 2.0, 0.3);
        let records = simulate_dataset(&spec(c, 1.0, 300, 23)).unwrap();
        let data = fitting_view(&records, &DecisionRegime::Baseline, false).unwrap();
        let sens_spec = SensitivitySpec {
            noise_sds: vec![0.0, 0.02, 0.1],
            n_repetitions: 5,
            seed: 41,
        };
        let a = noise_sensitivity(&data, &sens_spec, &FitOptions::default()).unwrap();
        let b = noise_sensitivity(&data, &sens_spec, &FitOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sensitivity_spec_validation() {
        let mut s = SensitivitySpec {
            noise_sds: vec![0.01, 0.05],
            ..SensitivitySpec::default()
        };
        assert!(s.validate().is_err(), "missing control point");
        s.noise_sds = vec![0.0, 0.05, 0.02];
        assert!(s.validate().is_err(), "not ascending");
        s.noise_sds = vec![0.0];
        s.n_repetitions = 0;
        assert!(s.validate().is_err());
    }
}
