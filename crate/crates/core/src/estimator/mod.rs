//! Multinomial-logit estimation of the cost vector from (belief, action)
//! pairs: choice probabilities, log-likelihood with analytic gradient,
//! bound-constrained maximum likelihood, and bootstrap confidence
//! intervals for the reported cost ratios.

mod bootstrap;
pub mod lbfgsb;

pub use bootstrap::{
    bootstrap_ratios, BootstrapIntervals, RatioInterval, RatioName, DEFAULT_BOOTSTRAP_RESAMPLES,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{expected_losses, Action, Belief, CostVector};

use lbfgsb::{minimize, MinimizeOptions};

// ── Options and results ─────────────────────────────────────────────────

/// Settings for [`fit_mle`]. The noise scale `beta` is fixed at 1 for all
/// reported analyses (only cost ratios are identified; joint scaling of
/// costs and beta leaves choice probabilities unchanged) and is exposed
/// only so simulation studies can probe misspecification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    pub max_iterations: usize,
    /// Tolerance on the infinity norm of the projected gradient of the
    /// per-record mean log-likelihood, making the criterion independent of
    /// dataset size.
    pub gradient_tolerance: f64,
    /// Lower box bound applied to each cost component.
    pub lower_bound: f64,
    /// Upper box bound applied to each cost component.
    pub upper_bound: f64,
    pub initial_cost: CostVector,
    pub beta: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 500,
            gradient_tolerance: 1e-8,
            lower_bound: 1e-6,
            upper_bound: 1e4,
            initial_cost: CostVector::new(1.0, 1.0, 1.0).expect("valid default cost"),
            beta: 1.0,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Parameter("max_iterations must be >= 1".to_string()));
        }
        if self.gradient_tolerance <= 0.0 || !self.gradient_tolerance.is_finite() {
            return Err(Error::Parameter(format!(
                "gradient_tolerance must be positive and finite, got {}",
                self.gradient_tolerance
            )));
        }
        if !self.lower_bound.is_finite() || self.lower_bound < 0.0 {
            return Err(Error::Parameter(format!(
                "lower_bound must be finite and >= 0, got {}",
                self.lower_bound
            )));
        }
        if !self.upper_bound.is_finite() || self.lower_bound >= self.upper_bound {
            return Err(Error::Parameter(format!(
                "bounds must satisfy lower < upper, got [{}, {}]",
                self.lower_bound, self.upper_bound
            )));
        }
        for c in self.initial_cost.as_array() {
            if c < self.lower_bound || c > self.upper_bound {
                return Err(Error::Parameter(format!(
                    "initial_cost component {c} outside bounds [{}, {}]",
                    self.lower_bound, self.upper_bound
                )));
            }
        }
        check_beta(self.beta)
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub cost: CostVector,
    /// Total (summed over records) log-likelihood at the estimate.
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Per-component flags, (c_fp, c_fn, c_defer) order, set when the
    /// estimate sits within one part in 10^6 of either bound.
    pub boundary_flags: [bool; 3],
    /// Infinity norm of the projected gradient of the mean log-likelihood.
    pub gradient_norm: f64,
}

impl FitResult {
    pub fn any_boundary(&self) -> bool {
        self.boundary_flags.iter().any(|&b| b)
    }
}

// ── Choice probabilities and likelihood ─────────────────────────────────

fn check_beta(beta: f64) -> Result<()> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::Parameter(format!(
            "beta must be positive and finite, got {beta}"
        )));
    }
    Ok(())
}

/// Log choice probabilities in [`Action::ALL`] order, stabilized by
/// subtracting the minimum expected loss before exponentiating. Always
/// finite for positive beta and finite costs, even where the underlying
/// probability underflows f64.
pub(crate) fn log_choice_probabilities(cost: &CostVector, belief: Belief, beta: f64) -> [f64; 3] {
    let losses = expected_losses(cost, belief);
    let min_loss = losses[0].min(losses[1]).min(losses[2]);
    let gaps = [
        (losses[0] - min_loss) / beta,
        (losses[1] - min_loss) / beta,
        (losses[2] - min_loss) / beta,
    ];
    let z = (-gaps[0]).exp() + (-gaps[1]).exp() + (-gaps[2]).exp();
    let log_z = z.ln();
    [-gaps[0] - log_z, -gaps[1] - log_z, -gaps[2] - log_z]
}

/// Softmax choice probabilities over (DiagnosePositive, DiagnoseNegative,
/// Defer): each action's weight is exp(−expected loss / beta).
pub fn choice_probabilities(cost: &CostVector, belief: Belief, beta: f64) -> Result<[f64; 3]> {
    check_beta(beta)?;
    let lp = log_choice_probabilities(cost, belief, beta);
    Ok([lp[0].exp(), lp[1].exp(), lp[2].exp()])
}

fn check_dataset(dataset: &[(Belief, Action)]) -> Result<()> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(())
}

/// Sum over records of the log probability of the observed action.
pub fn log_likelihood(dataset: &[(Belief, Action)], cost: &CostVector, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    check_dataset(dataset)?;
    Ok(dataset
        .iter()
        .map(|&(belief, action)| log_choice_probabilities(cost, belief, beta)[action.index()])
        .sum())
}

/// Exact gradient of [`log_likelihood`] in (c_fp, c_fn, c_defer) order.
///
/// Expected losses are linear in the cost components with per-record
/// loadings (1−p, p, 1), so each component is
/// Σ_i (I[a_i carries the component] − Pr(component's action | x_i)) ·
/// (−loading_i) / beta.
pub fn log_likelihood_gradient(
    dataset: &[(Belief, Action)],
    cost: &CostVector,
    beta: f64,
) -> Result<[f64; 3]> {
    check_beta(beta)?;
    check_dataset(dataset)?;
    let mut grad = [0.0; 3];
    for &(belief, action) in dataset {
        let lp = log_choice_probabilities(cost, belief, beta);
        let probs = [lp[0].exp(), lp[1].exp(), lp[2].exp()];
        let p = belief.value();
        let loadings = [1.0 - p, p, 1.0];
        let observed = action.index();
        for j in 0..3 {
            let indicator = if observed == j { 1.0 } else { 0.0 };
            grad[j] += (probs[j] - indicator) * loadings[j] / beta;
        }
    }
    Ok(grad)
}

// ── Maximum likelihood ──────────────────────────────────────────────────

/// Mean negative log-likelihood and its gradient over a prepared view.
fn mean_nll_and_grad(records: &[(f64, usize)], cost: &[f64; 3], beta: f64) -> (f64, [f64; 3]) {
    let mut nll = 0.0;
    let mut grad = [0.0; 3];
    for &(p, observed) in records {
        let losses = [cost[0] * (1.0 - p), cost[1] * p, cost[2]];
        let min_loss = losses[0].min(losses[1]).min(losses[2]);
        let gaps = [
            (losses[0] - min_loss) / beta,
            (losses[1] - min_loss) / beta,
            (losses[2] - min_loss) / beta,
        ];
        let w = [(-gaps[0]).exp(), (-gaps[1]).exp(), (-gaps[2]).exp()];
        let z = w[0] + w[1] + w[2];
        nll += gaps[observed] + z.ln();
        let loadings = [1.0 - p, p, 1.0];
        for j in 0..3 {
            let indicator = if observed == j { 1.0 } else { 0.0 };
            grad[j] += (indicator - w[j] / z) * loadings[j] / beta;
        }
    }
    let scale = 1.0 / records.len() as f64;
    (
        nll * scale,
        [grad[0] * scale, grad[1] * scale, grad[2] * scale],
    )
}

fn mean_nll(records: &[(f64, usize)], cost: &[f64; 3], beta: f64) -> f64 {
    let mut nll = 0.0;
    for &(p, observed) in records {
        let losses = [cost[0] * (1.0 - p), cost[1] * p, cost[2]];
        let min_loss = losses[0].min(losses[1]).min(losses[2]);
        let gaps = [
            (losses[0] - min_loss) / beta,
            (losses[1] - min_loss) / beta,
            (losses[2] - min_loss) / beta,
        ];
        let z = (-gaps[0]).exp() + (-gaps[1]).exp() + (-gaps[2]).exp();
        nll += gaps[observed] + z.ln();
    }
    nll / records.len() as f64
}

fn within_one_part_in_1e6(value: f64, bound: f64) -> bool {
    (value - bound).abs() <= bound.abs() * 1e-6
}

/// Starting corner for a single-action dataset: the likelihood is weakly
/// monotone in every component, so the optimum pins the observed action's
/// own cost at the lower bound and the competing costs at the upper bound.
fn degenerate_corner(action: Action, lower: f64, upper: f64) -> [f64; 3] {
    match action {
        Action::DiagnosePositive => [lower, upper, upper],
        Action::DiagnoseNegative => [upper, lower, upper],
        Action::Defer => [upper, upper, lower],
    }
}

/// Fit the cost vector by bound-constrained maximum likelihood.
///
/// Deterministic given (dataset, options), and exactly invariant to record
/// order: likelihood contributions are accumulated in a canonical sort of
/// the records, so permuting the dataset cannot move the estimate through
/// summation rounding. Datasets in which only one action was ever observed
/// are degenerate: the likelihood has no interior maximum and the fit lands
/// on the box corner, which the boundary flags report.
pub fn fit_mle(dataset: &[(Belief, Action)], options: &FitOptions) -> Result<FitResult> {
    options.validate()?;
    check_dataset(dataset)?;

    let mut records: Vec<(f64, usize)> = dataset
        .iter()
        .map(|&(belief, action)| (belief.value(), action.index()))
        .collect();
    records.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let beta = options.beta;

    let first_action = dataset[0].1;
    let single_action = dataset.iter().all(|&(_, a)| a == first_action);
    let x0 = if single_action {
        degenerate_corner(first_action, options.lower_bound, options.upper_bound)
    } else {
        options.initial_cost.as_array()
    };

    let bounds = [(options.lower_bound, options.upper_bound); 3];
    let outcome = minimize(
        |x| mean_nll(&records, x, beta),
        |x| mean_nll_and_grad(&records, x, beta),
        x0,
        &bounds,
        &MinimizeOptions {
            max_iterations: options.max_iterations,
            gradient_tolerance: options.gradient_tolerance,
            memory: 8,
        },
    )?;

    let cost = CostVector::new(outcome.x[0], outcome.x[1], outcome.x[2])?;
    let boundary_flags = std::array::from_fn(|i| {
        within_one_part_in_1e6(outcome.x[i], options.lower_bound)
            || within_one_part_in_1e6(outcome.x[i], options.upper_bound)
    });

    Ok(FitResult {
        cost,
        log_likelihood: -outcome.value * records.len() as f64,
        converged: outcome.converged,
        iterations: outcome.iterations,
        boundary_flags,
        gradient_norm: outcome.projected_gradient_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cost(fp: f64, fnn: f64, d: f64) -> CostVector {
        CostVector::new(fp, fnn, d).unwrap()
    }

    fn b(p: f64) -> Belief {
        Belief::new(p).unwrap()
    }

    #[test]
    fn uniform_probabilities_when_losses_equal() {
        // cost (1, 1, 0.5) at p = 0.5 gives expected losses (0.5, 0.5, 0.5).
        let probs = choice_probabilities(&cost(1.0, 1.0, 0.5), b(0.5), 1.0).unwrap();
        for p in probs {
            assert_abs_diff_eq!(p, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn probabilities_match_direct_evaluation() {
        // Cost (2, 1, 0.3) at p = 1 realizes expected losses (0, 1, 0.3).
        let probs = choice_probabilities(&cost(2.0, 1.0, 0.3), b(1.0), 1.0).unwrap();
        let weights = [1.0_f64, (-1.0_f64).exp(), (-0.3_f64).exp()];
        let z: f64 = weights.iter().sum();
        for (got, want) in probs.iter().zip(weights.iter().map(|w| w / z)) {
            assert_abs_diff_eq!(got, &want, epsilon = 1e-14);
        }
        // Five-decimal reference values.
        assert_abs_diff_eq!(probs[0], 0.47423, epsilon = 1e-5);
        assert_abs_diff_eq!(probs[1], 0.17446, epsilon = 1e-5);
        assert_abs_diff_eq!(probs[2], 0.35131, epsilon = 1e-5);
    }

    #[test]
    fn probabilities_sum_to_one_and_stay_positive() {
        for i in 0..=100 {
            let p = b(i as f64 / 100.0);
            let probs = choice_probabilities(&cost(1.0, 4.0, 0.5), p, 1.0).unwrap();
            let sum: f64 = probs.iter().sum();
            assert!((sum - 1.0).abs() <= 1e-12);
            assert!(probs.iter().all(|&q| q > 0.0));
        }
    }

    #[test]
    fn joint_scaling_leaves_probabilities_unchanged() {
        let base = cost(1.0, 4.0, 0.5);
        let probs = choice_probabilities(&base, b(0.37), 1.0).unwrap();
        for lambda in [0.5, 2.0, 10.0] {
            let scaled = base.scaled(lambda).unwrap();
            let probs_scaled = choice_probabilities(&scaled, b(0.37), lambda).unwrap();
            for (a, b) in probs.iter().zip(&probs_scaled) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn small_beta_modal_action_matches_argmin_on_belief_grid() {
        // At beta = 1e-6 the softmax mode equals the expected-loss argmin
        // everywhere at least 1e-3 away from a decision boundary. For cost
        // (1, 4, 0.5) the boundaries sit at p = 0.125 and p = 0.5.
        let c = cost(1.0, 4.0, 0.5);
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            if (p - 0.125).abs() <= 1e-3 || (p - 0.5).abs() <= 1e-3 {
                continue;
            }
            let belief = b(p);
            let probs = choice_probabilities(&c, belief, 1e-6).unwrap();
            let modal = Action::ALL
                .into_iter()
                .max_by(|x, y| probs[x.index()].total_cmp(&probs[y.index()]))
                .unwrap();
            assert_eq!(
                modal,
                crate::model::optimal_action(&c, belief),
                "modal action diverged from argmin at p = {p}"
            );
        }
    }

    #[test]
    fn beta_must_be_positive() {
        assert!(choice_probabilities(&cost(1.0, 1.0, 1.0), b(0.5), 0.0).is_err());
        assert!(choice_probabilities(&cost(1.0, 1.0, 1.0), b(0.5), -1.0).is_err());
    }

    #[test]
    fn log_likelihood_worked_values() {
        // Equal expected losses: one record contributes log(1/3).
        let data = [(b(0.5), Action::Defer)];
        let ll = log_likelihood(&data, &cost(1.0, 1.0, 0.5), 1.0).unwrap();
        assert_abs_diff_eq!(ll, (1.0_f64 / 3.0).ln(), epsilon = 1e-14);

        // Losses (0, 1, 0.3), observed DiagnosePositive: log of the direct
        // normalized weight, 1 / (1 + e^-1 + e^-0.3).
        let data = [(b(1.0), Action::DiagnosePositive)];
        let ll = log_likelihood(&data, &cost(2.0, 1.0, 0.3), 1.0).unwrap();
        let z = 1.0 + (-1.0_f64).exp() + (-0.3_f64).exp();
        assert_abs_diff_eq!(ll, -z.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(ll, -0.746070, epsilon = 1e-6);

        // Additivity: two identical records double the value.
        let data2 = [(b(1.0), Action::DiagnosePositive); 2];
        let ll2 = log_likelihood(&data2, &cost(2.0, 1.0, 0.3), 1.0).unwrap();
        assert_abs_diff_eq!(ll2, 2.0 * ll, epsilon = 1e-12);
    }

    #[test]
    fn log_likelihood_finite_at_extreme_costs() {
        let data = [(b(0.2), Action::DiagnosePositive), (b(0.9), Action::Defer)];
        let ll = log_likelihood(&data, &cost(1e4, 1e4, 1e-6), 1.0).unwrap();
        assert!(ll.is_finite());
    }

    #[test]
    fn empty_dataset_rejected() {
        assert!(matches!(
            log_likelihood(&[], &cost(1.0, 1.0, 1.0), 1.0),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            fit_mle(&[], &FitOptions::default()),
            Err(Error::EmptyDataset)
        ));
    }

    /// Central finite differences of the log-likelihood, the independent
    /// oracle for the analytic gradient.
    fn finite_difference_gradient(
        dataset: &[(Belief, Action)],
        c: &CostVector,
        beta: f64,
        step: f64,
    ) -> [f64; 3] {
        let base = c.as_array();
        std::array::from_fn(|j| {
            let mut plus = base;
            let mut minus = base;
            plus[j] += step;
            minus[j] -= step;
            let cp = CostVector::new(plus[0], plus[1], plus[2]).unwrap();
            let cm = CostVector::new(minus[0], minus[1], minus[2]).unwrap();
            (log_likelihood(dataset, &cp, beta).unwrap()
                - log_likelihood(dataset, &cm, beta).unwrap())
                / (2.0 * step)
        })
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let data = [
            (b(0.1), Action::DiagnoseNegative),
            (b(0.45), Action::Defer),
            (b(0.6), Action::DiagnosePositive),
            (b(0.85), Action::DiagnosePositive),
            (b(0.3), Action::Defer),
        ];
        for c in [
            cost(1.0, 4.0, 0.5),
            cost(0.7, 0.7, 2.0),
            cost(3.0, 1.0, 0.2),
        ] {
            let analytic = log_likelihood_gradient(&data, &c, 1.0).unwrap();
            let numeric = finite_difference_gradient(&data, &c, 1.0, 1e-5);
            for j in 0..3 {
                let denom = numeric[j].abs().max(1e-8);
                assert!(
                    ((analytic[j] - numeric[j]) / denom).abs() < 1e-5,
                    "component {j}: analytic {} vs numeric {}",
                    analytic[j],
                    numeric[j]
                );
            }
        }
    }

    #[test]
    fn all_defer_gradient_negative_in_defer_cost() {
        let data: Vec<_> = (1..10)
            .map(|i| (b(i as f64 / 10.0), Action::Defer))
            .collect();
        let grad = log_likelihood_gradient(&data, &cost(1.0, 1.0, 1.0), 1.0).unwrap();
        assert!(grad[2] < 0.0);
    }

    #[test]
    fn stationary_gradient_at_matching_frequencies() {
        // With equal expected losses the model assigns 1/3 to each action;
        // observing each action once makes the gradient vanish by symmetry.
        let data = [
            (b(0.5), Action::DiagnosePositive),
            (b(0.5), Action::DiagnoseNegative),
            (b(0.5), Action::Defer),
        ];
        let grad = log_likelihood_gradient(&data, &cost(1.0, 1.0, 0.5), 1.0).unwrap();
        for g in grad {
            assert_abs_diff_eq!(g, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_action_dataset_fits_to_flagged_corner() {
        let data: Vec<_> = (1..=50)
            .map(|i| (b(i as f64 / 51.0), Action::Defer))
            .collect();
        let fit = fit_mle(&data, &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.boundary_flags[0], "c_fp should sit at a bound");
        assert!(fit.boundary_flags[1], "c_fn should sit at a bound");
        assert_eq!(fit.cost.c_fp(), 1e4);
        assert_eq!(fit.cost.c_fn(), 1e4);
        assert_eq!(fit.cost.c_defer(), 1e-6);
    }

    #[test]
    fn fit_beats_exhaustive_grid_search() {
        // Independent global-optimality oracle: the fitted likelihood must
        // weakly dominate a dense log-spaced grid over the cost box.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let grid: Vec<f64> = (0..14)
            .map(|i| 0.05 * (20.0f64 / 0.05).powf(i as f64 / 13.0))
            .collect();
        for _ in 0..3 {
            let data: Vec<(Belief, Action)> = (0..150)
                .map(|_| {
                    let p = b(rng.random::<f64>());
                    let a = Action::ALL[rng.random_range(0..3)];
                    (p, a)
                })
                .collect();
            let fit = fit_mle(&data, &FitOptions::default()).unwrap();
            let mut best_grid = f64::NEG_INFINITY;
            for &fp in &grid {
                for &fnn in &grid {
                    for &d in &grid {
                        let ll = log_likelihood(&data, &cost(fp, fnn, d), 1.0).unwrap();
                        best_grid = best_grid.max(ll);
                    }
                }
            }
            assert!(
                fit.log_likelihood >= best_grid - 1e-9,
                "fit log-likelihood {} below grid optimum {}",
                fit.log_likelihood,
                best_grid
            );
        }
    }

    #[test]
    fn fit_survives_random_feasible_perturbations() {
        // Local-optimality stress across diverse datasets: no feasible
        // perturbation of the estimate may improve the likelihood.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let options = FitOptions::default();
        for trial in 0..30 {
            let n = rng.random_range(10..600);
            let generating = cost(
                rng.random_range(0.1..5.0),
                rng.random_range(0.1..5.0),
                rng.random_range(0.01..2.0),
            );
            let beta_gen = [0.25, 1.0, 4.0][trial % 3];
            let data: Vec<(Belief, Action)> = (0..n)
                .map(|_| {
                    let p = b(rng.random::<f64>());
                    let probs = choice_probabilities(&generating, p, beta_gen).unwrap();
                    let u = rng.random::<f64>();
                    let mut acc = 0.0;
                    let mut chosen = Action::Defer;
                    for action in Action::ALL {
                        acc += probs[action.index()];
                        if u < acc {
                            chosen = action;
                            break;
                        }
                    }
                    (p, chosen)
                })
                .collect();

            let fit = fit_mle(&data, &options).unwrap();
            let ll_fit = fit.log_likelihood;
            let at = fit.cost.as_array();
            for _ in 0..20 {
                let scale = 10f64.powf(rng.random_range(-4.0..-1.0));
                let perturbed: [f64; 3] = std::array::from_fn(|i| {
                    (at[i] * (1.0 + scale * rng.random_range(-1.0..1.0)))
                        .clamp(options.lower_bound, options.upper_bound)
                });
                let c = CostVector::new(perturbed[0], perturbed[1], perturbed[2]).unwrap();
                let ll = log_likelihood(&data, &c, 1.0).unwrap();
                assert!(
                    ll <= ll_fit + 1e-9,
                    "trial {trial}: perturbation improved the likelihood ({ll} > {ll_fit})"
                );
            }
        }
    }

    #[test]
    fn joint_scale_identification_in_fitting() {
        // Data generated at noise scale 2 with doubled costs fits, under
        // beta fixed at 1, to half the generating costs: the ratios are
        // identified, the absolute scale is not.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        let generating = cost(2.0, 8.0, 1.0);
        let data: Vec<(Belief, Action)> = (0..4000)
            .map(|_| {
                let p = b(rng.random::<f64>());
                let probs = choice_probabilities(&generating, p, 2.0).unwrap();
                let u = rng.random::<f64>();
                let mut acc = 0.0;
                let mut chosen = Action::Defer;
                for action in Action::ALL {
                    acc += probs[action.index()];
                    if u < acc {
                        chosen = action;
                        break;
                    }
                }
                (p, chosen)
            })
            .collect();
        let fit = fit_mle(&data, &FitOptions::default()).unwrap();
        let (fn_fp, defer_fp) = fit.cost.ratios().unwrap();
        assert!((fn_fp - 4.0).abs() / 4.0 < 0.12, "fn_fp {fn_fp}");
        assert!((defer_fp - 0.5).abs() / 0.5 < 0.17, "defer_fp {defer_fp}");
        assert!(
            (fit.cost.c_fp() - 1.0).abs() < 0.15,
            "absolute scale should land near generating cost / beta, got {}",
            fit.cost.c_fp()
        );
    }

    #[test]
    fn fit_is_deterministic() {
        let data: Vec<_> = (0..60)
            .map(|i| {
                let p = (i as f64 + 0.5) / 60.0;
                let a = if i % 3 == 0 {
                    Action::Defer
                } else if p > 0.5 {
                    Action::DiagnosePositive
                } else {
                    Action::DiagnoseNegative
                };
                (b(p), a)
            })
            .collect();
        let fit1 = fit_mle(&data, &FitOptions::default()).unwrap();
        let fit2 = fit_mle(&data, &FitOptions::default()).unwrap();
        assert_eq!(fit1, fit2);
    }

    #[test]
    fn options_validation() {
        let opts = FitOptions {
            beta: 0.0,
            ..FitOptions::default()
        };
        assert!(opts.validate().is_err());
        let opts = FitOptions {
            lower_bound: 5.0,
            upper_bound: 1.0,
            ..FitOptions::default()
        };
        assert!(opts.validate().is_err());
        let opts = FitOptions {
            initial_cost: cost(1.0, 1.0, 2e4),
            ..FitOptions::default()
        };
        assert!(opts.validate().is_err());
    }
}
