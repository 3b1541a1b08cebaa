//! Shared helpers for the integration suites.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revpref::dataset::{default_benchmark_catalog, DatasetFile};
use revpref::estimator::choice_probabilities;
use revpref::model::{Action, Belief, CostVector, DecisionRegime};
use revpref::simulate::{simulate_dataset, AgentSpec, BeliefDistribution};

pub fn cost(fp: f64, fnn: f64, d: f64) -> CostVector {
    CostVector::new(fp, fnn, d).unwrap()
}

/// Softmax-sampled action at one belief under the given cost.
pub fn sample_action(c: &CostVector, p: Belief, rng: &mut ChaCha8Rng) -> Action {
    let probs = choice_probabilities(c, p, 1.0).unwrap();
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

/// A multi-regime dataset from the synthetic agent. Baseline records come
/// from `base_cost`; the elicited-probability, true-probability, and
/// per-benchmark cost-prompted actions are then sampled at each record's
/// own belief under `base_cost`, `truep_cost`, and the benchmark's cost
/// respectively (a steered agent that adopts the prompted cost up to
/// softmax noise). Every record also carries fixed self-reports.
pub fn multi_regime_dataset(
    n: usize,
    seed: u64,
    base_cost: CostVector,
    truep_cost: CostVector,
    benchmark_ids: &[&str],
) -> DatasetFile {
    let catalog = default_benchmark_catalog();

    let mut records = simulate_dataset(&AgentSpec {
        cost: base_cost,
        beta: 1.0,
        belief_distribution: BeliefDistribution::Uniform,
        n_cases: n,
        seed,
        gumbel_shocks: false,
    })
    .unwrap();

    let mut regime_costs: Vec<(DecisionRegime, CostVector)> = vec![
        (DecisionRegime::ElicitedProbPrompt, base_cost),
        (DecisionRegime::TrueProbPrompt, truep_cost),
    ];
    for id in benchmark_ids {
        let bm = catalog.iter().find(|b| b.id == *id).expect("benchmark id");
        regime_costs.push((DecisionRegime::CostFunctionPrompt(id.to_string()), bm.cost));
    }

    for (stream, (regime, regime_cost)) in regime_costs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0x7e57 + stream as u64);
        for record in records.iter_mut() {
            let action = sample_action(regime_cost, record.p_elicited, &mut rng);
            record.actions.insert(regime.clone(), action);
        }
    }
    for record in records.iter_mut() {
        record.self_report_global = Some(cost(1.0, 10.0, 2.0));
        record.self_report_case = Some(cost(1.0, 5.0, 1.0));
    }

    DatasetFile {
        path: PathBuf::from("synthetic"),
        records,
        benchmark_catalog: catalog,
    }
}

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}
