//! The Square arena and the history-extended view of an environment.
//!
//! Square: a point agent in `[-5, 5]^2` starts at the centre, commands its
//! velocity directly (each component clipped to `[-1, 1]`), pays `-dt` per
//! step, and finishes once within 0.5 of a target drawn uniformly on the
//! circle of radius 2.5 around the centre.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::policy::ExtendedState;

pub const ARENA_HALF: f64 = 5.0;
pub const TARGET_RADIUS: f64 = 2.5;
pub const DONE_DIST: f64 = 0.5;
pub const EPISODE_CAP_SECONDS: f64 = 1000.0;
pub const SQUARE_OBS_DIM: usize = 6;
pub const SQUARE_ACT_DIM: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("step called on a finished episode")]
    StepAfterDone,
    #[error("action has {got} dimensions, expected {expected}")]
    ActionDim { expected: usize, got: usize },
    #[error("action rate must be positive and finite, got {0}")]
    BadRate(f64),
}

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Reached the target: a true terminal state.
    Goal,
    /// Ran out of time; the state itself is not terminal.
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub termination: Option<Termination>,
}

impl Step {
    pub fn done(&self) -> bool {
        self.termination.is_some()
    }
}

/// Minimal episodic environment interface.
pub trait Env {
    fn obs_dim(&self) -> usize;
    fn act_dim(&self) -> usize;
    fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64>;
    fn step(&mut self, action: &[f64]) -> Result<Step, EnvError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareConfig {
    /// Actions per simulated second.
    pub action_rate: f64,
    /// Episode time cap in simulated seconds; `None` runs until the goal.
    pub time_limit: Option<f64>,
    /// When false the target never ends an episode (free-running rollouts).
    pub terminate_on_goal: bool,
}

impl SquareConfig {
    pub fn new(action_rate: f64) -> Self {
        Self {
            action_rate,
            time_limit: Some(EPISODE_CAP_SECONDS),
            terminate_on_goal: true,
        }
    }
}

/// One row of a trajectory log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub ax: f64,
    pub ay: f64,
    pub reward: f64,
    pub done: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquareEnv {
    config: SquareConfig,
    dt: f64,
    max_steps: Option<u64>,
    pos: [f64; 2],
    vel: [f64; 2],
    target: [f64; 2],
    steps: u64,
    done: Option<Termination>,
}

impl SquareEnv {
    pub fn new(config: SquareConfig) -> Result<Self, EnvError> {
        if !(config.action_rate > 0.0 && config.action_rate.is_finite()) {
            return Err(EnvError::BadRate(config.action_rate));
        }
        let dt = 1.0 / config.action_rate;
        let max_steps = config
            .time_limit
            .map(|limit| (limit * config.action_rate).round().max(1.0) as u64);
        Ok(Self {
            config,
            dt,
            max_steps,
            pos: [0.0; 2],
            vel: [0.0; 2],
            target: [TARGET_RADIUS, 0.0],
            steps: 0,
            done: None,
        })
    }

    pub fn with_rate(action_rate: f64) -> Result<Self, EnvError> {
        Self::new(SquareConfig::new(action_rate))
    }

    pub fn config(&self) -> &SquareConfig {
        &self.config
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn pos(&self) -> [f64; 2] {
        self.pos
    }

    pub fn vel(&self) -> [f64; 2] {
        self.vel
    }

    pub fn target(&self) -> [f64; 2] {
        self.target
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Simulated time since reset, `steps * dt`.
    pub fn elapsed(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn termination(&self) -> Option<Termination> {
        self.done
    }

    pub fn is_done(&self) -> bool {
        self.done.is_some()
    }

    pub fn distance_to_target(&self) -> f64 {
        (self.target[0] - self.pos[0]).hypot(self.target[1] - self.pos[1])
    }

    /// `[pos, vel, target - pos]`.
    pub fn observation(&self) -> Vec<f64> {
        vec![
            self.pos[0],
            self.pos[1],
            self.vel[0],
            self.vel[1],
            self.target[0] - self.pos[0],
            self.target[1] - self.pos[1],
        ]
    }

    /// Reset with an explicit target (used by tests and scripted scenarios).
    pub fn reset_with_target(&mut self, target: [f64; 2]) -> Vec<f64> {
        self.pos = [0.0; 2];
        self.vel = [0.0; 2];
        self.target = target;
        self.steps = 0;
        self.done = None;
        if self.config.terminate_on_goal && self.distance_to_target() < DONE_DIST {
            self.done = Some(Termination::Goal);
        }
        self.observation()
    }

    pub fn trajectory_row(&self, action: &[f64], reward: f64) -> TrajectoryRow {
        TrajectoryRow {
            t: self.elapsed(),
            x: self.pos[0],
            y: self.pos[1],
            vx: self.vel[0],
            vy: self.vel[1],
            ax: action.first().copied().unwrap_or(0.0),
            ay: action.get(1).copied().unwrap_or(0.0),
            reward,
            done: self.is_done(),
        }
    }
}

impl Env for SquareEnv {
    fn obs_dim(&self) -> usize {
        SQUARE_OBS_DIM
    }

    fn act_dim(&self) -> usize {
        SQUARE_ACT_DIM
    }

    fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<f64> {
        let psi = rng.random_range(0.0..std::f64::consts::TAU);
        self.reset_with_target([TARGET_RADIUS * psi.cos(), TARGET_RADIUS * psi.sin()])
    }

    fn step(&mut self, action: &[f64]) -> Result<Step, EnvError> {
        if self.done.is_some() {
            return Err(EnvError::StepAfterDone);
        }
        if action.len() != SQUARE_ACT_DIM {
            return Err(EnvError::ActionDim {
                expected: SQUARE_ACT_DIM,
                got: action.len(),
            });
        }
        for i in 0..2 {
            // NaN actions are treated as zero velocity.
            let a = if action[i].is_nan() { 0.0 } else { action[i] };
            self.vel[i] = a.clamp(-1.0, 1.0);
            self.pos[i] = (self.pos[i] + self.vel[i] * self.dt).clamp(-ARENA_HALF, ARENA_HALF);
        }
        self.steps += 1;
        let reward = -self.dt;
        if self.config.terminate_on_goal && self.distance_to_target() < DONE_DIST {
            self.done = Some(Termination::Goal);
        } else if self.max_steps.is_some_and(|m| self.steps >= m) {
            self.done = Some(Termination::TimeLimit);
        }
        Ok(Step {
            obs: self.observation(),
            reward,
            termination: self.done,
        })
    }
}

/// Presents an environment as its history-extended counterpart: the state
/// carries the last `p` (state, action) pairs alongside the current state,
/// while rewards and termination pass through untouched.
#[derive(Debug, Clone)]
pub struct HistoryWrapper<E: Env> {
    inner: E,
    order: usize,
    state: ExtendedState,
}

/// Transition of the wrapped environment.
#[derive(Debug, Clone, PartialEq)]
pub struct WrappedStep {
    pub reward: f64,
    pub termination: Option<Termination>,
    /// Observation after the step (also the new current state).
    pub obs: Vec<f64>,
}

impl<E: Env> HistoryWrapper<E> {
    pub fn new(inner: E, order: usize) -> Self {
        let state = ExtendedState::new(order, inner.act_dim(), vec![0.0; inner.obs_dim()]);
        Self {
            inner,
            order,
            state,
        }
    }

    pub fn inner(&self) -> &E {
        &self.inner
    }

    pub fn inner_mut(&mut self) -> &mut E {
        &mut self.inner
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn state(&self) -> &ExtendedState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut ExtendedState {
        &mut self.state
    }

    pub fn reset<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &ExtendedState {
        let s0 = self.inner.reset(rng);
        self.state = ExtendedState::new(self.order, self.inner.act_dim(), s0);
        &self.state
    }

    /// Apply `action`; `residual` is cached in the history for later sampling.
    pub fn step(
        &mut self,
        action: &[f64],
        residual: Option<Vec<f64>>,
    ) -> Result<WrappedStep, EnvError> {
        let step = self.inner.step(action)?;
        self.state
            .push(action.to_vec(), residual, step.obs.clone());
        Ok(WrappedStep {
            reward: step.reward,
            termination: step.termination,
            obs: step.obs,
        })
    }
}
