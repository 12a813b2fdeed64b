use rayon::prelude::*;

use super::{BenchError, PolicySpec};
use crate::nn::Checkpoint;
use crate::trainer::{ProgressRow, TrainConfig, Trainer};

pub const DEFAULT_LEARN_SECONDS: f64 = 50_000.0;
pub const DEFAULT_LEARN_SEEDS: usize = 5;

/// Learning curves of every seed plus their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningResult {
    pub action_rate: f64,
    pub policy: PolicySpec,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<Vec<ProgressRow>>,
    /// Final networks of each seed.
    pub checkpoints: Vec<Checkpoint>,
    /// Row-wise mean over seeds; NaN entries are skipped.
    pub mean: Vec<ProgressRow>,
}

fn nan_mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values.filter(|v| v.is_finite()) {
        sum += v;
        n += 1;
    }
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

impl LearningResult {
    /// Mean over seeds of each seed's first reported return, i.e. the
    /// return of the untrained policy.
    pub fn initial_return(&self) -> f64 {
        nan_mean(
            self.per_seed
                .iter()
                .map(|rows| rows.iter().map(|r| r.mean_return).find(|v| v.is_finite()).unwrap_or(f64::NAN)),
        )
    }

    /// Mean over seeds of the last reported return.
    pub fn final_return(&self) -> f64 {
        nan_mean(self.per_seed.iter().map(|rows| rows.last().map_or(f64::NAN, |r| r.mean_return)))
    }
}

/// Train one agent per seed for `total_sim_seconds` at `action_rate`.
/// `config` holds the 10 Hz values and is rescaled to the rate. Seeds run in
/// parallel.
pub fn run_learning(
    action_rate: f64,
    spec: PolicySpec,
    total_sim_seconds: f64,
    seeds: &[u64],
    config: &TrainConfig,
) -> Result<LearningResult, BenchError> {
    let config = config.for_rate(action_rate);
    let runs: Vec<(Vec<ProgressRow>, Checkpoint)> = seeds
        .par_iter()
        .map(|&seed| -> Result<_, BenchError> {
            let mut trainer = Trainer::square(spec.build()?, action_rate, config.clone(), seed)?;
            let rows = trainer.run(total_sim_seconds, |_| {})?;
            Ok((rows, trainer.checkpoint()))
        })
        .collect::<Result<_, _>>()?;
    let (per_seed, checkpoints): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let len = per_seed.iter().map(Vec::len).min().unwrap_or(0);
    let mean = (0..len)
        .map(|i| {
            let col = |f: fn(&ProgressRow) -> f64| nan_mean(per_seed.iter().map(|rows| f(&rows[i])));
            ProgressRow {
                sim_seconds: per_seed[0][i].sim_seconds,
                mean_return: col(|r| r.mean_return),
                mean_ep_len: col(|r| r.mean_ep_len),
                kl: col(|r| r.kl),
                clipfrac: col(|r| r.clipfrac),
                explained_var: col(|r| r.explained_var),
            }
        })
        .collect();
    Ok(LearningResult {
        action_rate,
        policy: spec,
        seeds: seeds.to_vec(),
        per_seed,
        checkpoints,
        mean,
    })
}
