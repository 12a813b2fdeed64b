use rand::Rng;

use super::{TrainConfig, TrainError};
use crate::nn::{Mlp, PolicyHead};
use crate::policy::Policy;

/// Output-layer gain of the value network.
pub const VALUE_OUTPUT_GAIN: f64 = 1.0;

/// Policy head, value network and the policy family that interprets the head.
#[derive(Debug, Clone)]
pub struct Agent {
    pub head: PolicyHead,
    pub value: Mlp,
    pub policy: Policy,
}

impl Agent {
    /// Fresh networks. The head is drawn before the value net, so two agents
    /// built from the same RNG state share initial weights whatever their
    /// policy family.
    pub fn new<R: Rng + ?Sized>(
        mut policy: Policy,
        obs_dim: usize,
        act_dim: usize,
        config: &TrainConfig,
        rng: &mut R,
    ) -> Result<Self, TrainError> {
        let head = PolicyHead::new(obs_dim, act_dim, &config.hidden, config.state_dependent_std, rng)?;
        let mut sizes = vec![obs_dim];
        sizes.extend_from_slice(&config.hidden);
        sizes.push(1);
        let value = Mlp::orthogonal(&sizes, VALUE_OUTPUT_GAIN, rng)?;
        if let Policy::Autoregressive(p) = &mut policy {
            p.cache_residuals = config.cache_residuals;
        }
        Ok(Self { head, value, policy })
    }

    pub fn num_params(&self) -> usize {
        self.head.num_params() + self.value.num_params()
    }

    /// Head parameters followed by value parameters.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.head.params();
        p.extend_from_slice(self.value.params());
        p
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), TrainError> {
        let nh = self.head.num_params();
        if params.len() != self.num_params() {
            return Err(crate::nn::NnError::ParamLength {
                expected: self.num_params(),
                got: params.len(),
            }
            .into());
        }
        self.head.set_params(&params[..nh])?;
        self.value.set_params(&params[nh..])?;
        Ok(())
    }

    /// `V(s)` for `rows` observations laid out row-major.
    pub fn values(&self, obs: &[f64], rows: usize) -> Result<Vec<f64>, TrainError> {
        if rows == 0 {
            return Ok(Vec::new());
        }
        Ok(self.value.forward_batch(obs, rows)?.output().to_vec())
    }
}
