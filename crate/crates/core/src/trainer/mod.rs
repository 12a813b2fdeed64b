//! Clipped-surrogate policy optimisation with GAE.
//!
//! The autoregressive policy is trained as an ordinary Gaussian policy over
//! the history-extended state. The value function sees only the current
//! observation, so its size does not depend on the process order.

mod agent;
mod config;
mod gae;
mod ppo;
mod rollout;
mod train;

pub use agent::{Agent, VALUE_OUTPUT_GAIN};
pub use config::{TrainConfig, BASE_ACTION_RATE};
pub use gae::{gae, normalize, GaeInput};
pub use ppo::{MinibatchLoss, Ppo, UpdateStats};
pub use rollout::{Collector, EpisodeStat, RolloutBatch};
pub use train::{ProgressRow, Trainer, RETURN_WINDOW};

use thiserror::Error;

use crate::env::EnvError;
use crate::nn::NnError;
use crate::policy::PolicyError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(
        "non-finite loss at epoch {epoch}, minibatch {minibatch} \
         (policy loss {policy_loss}, value loss {value_loss}, grad norm {grad_norm})"
    )]
    NonFinite {
        epoch: usize,
        minibatch: usize,
        policy_loss: f64,
        value_loss: f64,
        grad_norm: f64,
    },
}
