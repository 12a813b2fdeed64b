use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Agent, TrainError};
use crate::env::{Env, HistoryWrapper, Termination};
use crate::policy::TransitionView;

/// A finished episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeStat {
    pub ret: f64,
    pub steps: usize,
    pub termination: Termination,
}

/// Flat per-step storage of one collection phase.
///
/// Histories are stored most recent first and exactly as they were at
/// collection time, so they can be handed to the policy as a
/// [`TransitionView`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutBatch {
    pub obs_dim: usize,
    pub act_dim: usize,
    pub obs: Vec<f64>,
    pub actions: Vec<f64>,
    pub hist_offsets: Vec<usize>,
    pub hist_obs: Vec<f64>,
    pub hist_actions: Vec<f64>,
    pub rewards: Vec<f64>,
    /// Log-density of each action under the collecting parameters, with
    /// cached residuals when the policy uses them.
    pub log_probs: Vec<f64>,
    /// `V(s_t)` under the collecting parameters.
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    pub timeouts: Vec<bool>,
    /// `V` of the final state of a timed-out episode; zero elsewhere.
    pub bootstrap_values: Vec<f64>,
    /// `V` of the state after the last step.
    pub last_value: f64,
    pub episodes: Vec<EpisodeStat>,
}

impl RolloutBatch {
    fn new(obs_dim: usize, act_dim: usize, steps: usize) -> Self {
        Self {
            obs_dim,
            act_dim,
            obs: Vec::with_capacity(steps * obs_dim),
            actions: Vec::with_capacity(steps * act_dim),
            hist_offsets: vec![0],
            rewards: Vec::with_capacity(steps),
            log_probs: Vec::with_capacity(steps),
            dones: Vec::with_capacity(steps),
            timeouts: Vec::with_capacity(steps),
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn view(&self) -> TransitionView<'_> {
        TransitionView {
            obs_dim: self.obs_dim,
            act_dim: self.act_dim,
            obs: &self.obs,
            actions: &self.actions,
            hist_offsets: &self.hist_offsets,
            hist_obs: &self.hist_obs,
            hist_actions: &self.hist_actions,
        }
    }
}

/// Runs an agent in an environment, keeping the episode in progress alive
/// across collection phases.
#[derive(Debug, Clone)]
pub struct Collector<E: Env> {
    env: HistoryWrapper<E>,
    env_rng: ChaCha8Rng,
    noise_rng: ChaCha8Rng,
    episode_return: f64,
    episode_steps: usize,
    started: bool,
}

impl<E: Env> Collector<E> {
    /// `order` is the history length the policy consumes. Resets and action
    /// noise draw from separate streams of `seed`.
    pub fn new(env: E, order: usize, seed: u64) -> Self {
        let mut env_rng = ChaCha8Rng::seed_from_u64(seed);
        env_rng.set_stream(1);
        let mut noise_rng = ChaCha8Rng::seed_from_u64(seed);
        noise_rng.set_stream(2);
        Self {
            env: HistoryWrapper::new(env, order),
            env_rng,
            noise_rng,
            episode_return: 0.0,
            episode_steps: 0,
            started: false,
        }
    }

    pub fn env(&self) -> &HistoryWrapper<E> {
        &self.env
    }

    /// Collect `steps` transitions.
    pub fn collect(&mut self, agent: &Agent, steps: usize) -> Result<RolloutBatch, TrainError> {
        if !self.started {
            self.env.reset(&mut self.env_rng);
            self.started = true;
        } else {
            // The parameters changed since the cached residuals in the
            // current history were produced.
            self.env.state_mut().on_params_updated();
        }
        let obs_dim = self.env.state().current().len();
        let act_dim = agent.head.act_dim();
        let mut batch = RolloutBatch::new(obs_dim, act_dim, steps);
        let mut final_obs = Vec::new();
        let mut final_at = Vec::new();
        let mut noise = vec![0.0; act_dim];
        for t in 0..steps {
            let state = self.env.state();
            batch.obs.extend_from_slice(state.current());
            for e in state.history() {
                batch.hist_obs.extend_from_slice(&e.obs);
                batch.hist_actions.extend_from_slice(&e.action);
            }
            batch
                .hist_offsets
                .push(batch.hist_offsets[t] + state.history_len());
            for n in noise.iter_mut() {
                *n = StandardNormal.sample(&mut self.noise_rng);
            }
            let sample = agent.policy.sample(state, &agent.head, &noise)?;
            let step = self.env.step(&sample.action, Some(sample.residual))?;
            batch.actions.extend_from_slice(&sample.action);
            batch.log_probs.push(sample.log_prob);
            batch.rewards.push(step.reward);
            self.episode_return += step.reward;
            self.episode_steps += 1;
            let timeout = step.termination == Some(Termination::TimeLimit);
            batch.dones.push(step.termination.is_some());
            batch.timeouts.push(timeout);
            if let Some(termination) = step.termination {
                if timeout {
                    final_obs.extend_from_slice(&step.obs);
                    final_at.push(t);
                }
                batch.episodes.push(EpisodeStat {
                    ret: self.episode_return,
                    steps: self.episode_steps,
                    termination,
                });
                self.episode_return = 0.0;
                self.episode_steps = 0;
                self.env.reset(&mut self.env_rng);
            }
        }
        batch.values = agent.values(&batch.obs, steps)?;
        batch.bootstrap_values = vec![0.0; steps];
        for (t, v) in final_at.iter().zip(agent.values(&final_obs, final_at.len())?) {
            batch.bootstrap_values[*t] = v;
        }
        batch.last_value = agent.values(self.env.state().current(), 1)?[0];
        Ok(batch)
    }
}
