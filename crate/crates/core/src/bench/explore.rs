use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BenchError, PolicySpec};
use crate::env::{HistoryWrapper, SquareConfig, SquareEnv};
use crate::policy::FixedHead;

/// Simulated seconds per (rate, policy, seed) run.
pub const DEFAULT_EXPLORE_BUDGET: f64 = 1e5;
pub const DEFAULT_RATES: [f64; 5] = [5.0, 10.0, 25.0, 50.0, 100.0];

/// Time-to-target statistics of a random agent at one action rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationReport {
    pub action_rate: f64,
    pub policy: PolicySpec,
    pub sigma_scale: f64,
    /// Simulated seconds over all seeds, the unfinished tail included.
    pub total_sim_seconds: f64,
    pub episodes_completed: usize,
    pub mean_time: f64,
    pub median_time: f64,
    /// No episode finished; the times are the per-seed budget.
    pub censored: bool,
    pub seeds: Vec<u64>,
}

/// Raw outcome of one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    /// Duration of each episode that reached the target, in order.
    pub times: Vec<f64>,
    pub sim_seconds: f64,
}

/// Run episodes back to back under the fixed random policy (zero mean,
/// scale `sigma_scale`) until `budget_seconds` are simulated. Episodes have
/// no time cap; the one still running when the budget ends is dropped.
pub fn explore_cell(
    action_rate: f64,
    spec: PolicySpec,
    sigma_scale: f64,
    budget_seconds: f64,
    seed: u64,
) -> Result<CellResult, BenchError> {
    let policy = spec.build()?;
    let env = SquareEnv::new(SquareConfig {
        time_limit: None,
        ..SquareConfig::new(action_rate)
    })?;
    let dt = env.dt();
    let max_steps = (budget_seconds / dt).round() as u64;
    let head = FixedHead::standard(2, sigma_scale);
    let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
    env_rng.set_stream(1);
    let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
    noise_rng.set_stream(2);
    let mut env = HistoryWrapper::new(env, policy.order());
    let mut times = Vec::new();
    let mut steps = 0u64;
    let mut noise = [0.0; 2];
    env.reset(&mut env_rng);
    while steps < max_steps {
        if env.inner().is_done() {
            // a target at the start position ends the episode at time 0
            times.push(env.inner().elapsed());
            env.reset(&mut env_rng);
            continue;
        }
        for n in noise.iter_mut() {
            *n = StandardNormal.sample(&mut noise_rng);
        }
        let s = policy.sample(env.state(), &head, &noise)?;
        let step = env.step(&s.action, Some(s.residual))?;
        steps += 1;
        if step.termination.is_some() {
            times.push(env.inner().elapsed());
            env.reset(&mut env_rng);
        }
    }
    Ok(CellResult {
        times,
        sim_seconds: steps as f64 * dt,
    })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// One report per (rate, policy) pair, pooling episodes over `seeds`.
/// Cells run in parallel; results do not depend on the thread count.
pub fn run_exploration(
    rates: &[f64],
    specs: &[PolicySpec],
    sigma_scale: f64,
    budget_seconds: f64,
    seeds: &[u64],
) -> Result<Vec<ExplorationReport>, BenchError> {
    let cells: Vec<(f64, PolicySpec, u64)> = rates
        .iter()
        .flat_map(|&r| specs.iter().flat_map(move |&s| seeds.iter().map(move |&seed| (r, s, seed))))
        .collect();
    let results: Vec<CellResult> = cells
        .par_iter()
        .map(|&(r, s, seed)| explore_cell(r, s, sigma_scale, budget_seconds, seed))
        .collect::<Result<_, _>>()?;
    let mut reports = Vec::new();
    for (chunk, group) in results.chunks(seeds.len().max(1)).zip(cells.chunks(seeds.len().max(1))) {
        let (action_rate, policy, _) = group[0];
        let mut times: Vec<f64> = chunk.iter().flat_map(|c| c.times.iter().copied()).collect();
        times.sort_by(f64::total_cmp);
        let censored = times.is_empty();
        let (mean_time, median_time) = if censored {
            (budget_seconds, budget_seconds)
        } else {
            (times.iter().sum::<f64>() / times.len() as f64, median(&times))
        };
        reports.push(ExplorationReport {
            action_rate,
            policy,
            sigma_scale,
            total_sim_seconds: chunk.iter().map(|c| c.sim_seconds).sum(),
            episodes_completed: times.len(),
            mean_time,
            median_time,
            censored,
            seeds: seeds.to_vec(),
        });
    }
    Ok(reports)
}
