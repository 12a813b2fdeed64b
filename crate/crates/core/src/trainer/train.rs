use std::collections::VecDeque;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Agent, Collector, EpisodeStat, Ppo, TrainConfig, TrainError, UpdateStats};
use crate::env::{SquareConfig, SquareEnv, SQUARE_ACT_DIM, SQUARE_OBS_DIM};
use crate::nn::Checkpoint;
use crate::policy::Policy;

/// Number of most recent episodes averaged into the reported return.
pub const RETURN_WINDOW: usize = 100;

/// One line of the progress log, written after each collect/update cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProgressRow {
    /// Simulated time collected so far: steps times dt.
    pub sim_seconds: f64,
    /// Mean return of the last [`RETURN_WINDOW`] finished episodes; NaN
    /// until one finishes.
    pub mean_return: f64,
    /// Mean length in steps of the same episodes.
    pub mean_ep_len: f64,
    pub kl: f64,
    pub clipfrac: f64,
    pub explained_var: f64,
}

/// Collect/update loop on the Square environment.
#[derive(Debug, Clone)]
pub struct Trainer {
    pub agent: Agent,
    ppo: Ppo,
    collector: Collector<SquareEnv>,
    shuffle_rng: ChaCha8Rng,
    dt: f64,
    steps: u64,
    recent: VecDeque<EpisodeStat>,
    last_stats: UpdateStats,
}

impl Trainer {
    /// `config` is used as given; scale it with [`TrainConfig::for_rate`]
    /// first when training away from 10 Hz. All randomness derives from
    /// `seed`: network init, resets, action noise and minibatch shuffling
    /// each use their own stream.
    pub fn square(policy: Policy, action_rate: f64, config: TrainConfig, seed: u64) -> Result<Self, TrainError> {
        config.validate()?;
        let env = SquareEnv::new(SquareConfig {
            time_limit: Some(config.episode_cap_seconds),
            ..SquareConfig::new(action_rate)
        })?;
        let dt = env.dt();
        let mut init_rng = ChaCha8Rng::seed_from_u64(seed);
        let agent = Agent::new(policy, SQUARE_OBS_DIM, SQUARE_ACT_DIM, &config, &mut init_rng)?;
        let collector = Collector::new(env, agent.policy.order(), seed);
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(seed);
        shuffle_rng.set_stream(3);
        Ok(Self {
            ppo: Ppo::new(config, &agent)?,
            agent,
            collector,
            shuffle_rng,
            dt,
            steps: 0,
            recent: VecDeque::with_capacity(RETURN_WINDOW),
            last_stats: UpdateStats::default(),
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.ppo.config
    }

    pub fn sim_seconds(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn last_stats(&self) -> &UpdateStats {
        &self.last_stats
    }

    /// One batch of collection followed by one optimisation phase.
    pub fn iterate(&mut self) -> Result<ProgressRow, TrainError> {
        let batch = self.collector.collect(&self.agent, self.ppo.config.batch_size)?;
        self.steps += batch.len() as u64;
        for ep in &batch.episodes {
            if self.recent.len() == RETURN_WINDOW {
                self.recent.pop_front();
            }
            self.recent.push_back(*ep);
        }
        let stats = self.ppo.update(&mut self.agent, &batch, &mut self.shuffle_rng)?;
        self.last_stats = stats;
        let (mean_return, mean_ep_len) = if self.recent.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            let k = self.recent.len() as f64;
            (
                self.recent.iter().map(|e| e.ret).sum::<f64>() / k,
                self.recent.iter().map(|e| e.steps as f64).sum::<f64>() / k,
            )
        };
        Ok(ProgressRow {
            sim_seconds: self.sim_seconds(),
            mean_return,
            mean_ep_len,
            kl: stats.approx_kl,
            clipfrac: stats.clipfrac,
            explained_var: stats.explained_var,
        })
    }

    /// Iterate until at least `total_sim_seconds` have been simulated.
    pub fn run<F: FnMut(&ProgressRow)>(
        &mut self,
        total_sim_seconds: f64,
        mut on_row: F,
    ) -> Result<Vec<ProgressRow>, TrainError> {
        let mut rows = Vec::new();
        while self.sim_seconds() < total_sim_seconds - 1e-9 {
            let row = self.iterate()?;
            on_row(&row);
            rows.push(row);
        }
        Ok(rows)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            head: self.agent.head.clone(),
            value: Some(self.agent.value.clone()),
            step: self.steps,
        }
    }
}
