//! Gaussian and autoregressive policies.
//!
//! An autoregressive policy (ARP) draws
//! `a_t = mu(s_t) + sigma(s_t) f + sigma(s_t) sigma_Z eps_t`, where the
//! history term `f = sum_k phi_k (a_{t-k} - mu(s_{t-k})) / sigma(s_{t-k})`
//! replays the underlying AR process through past actions. With a zero mean
//! and unit scale the action stream *is* an AR realisation; with `alpha = 0`
//! it is an ordinary diagonal Gaussian policy.

mod batch;
mod state;

pub use batch::{LogProbEval, TransitionView};
pub use state::{ExtendedState, HistoryEntry};

use thiserror::Error;

use crate::ar::ArModel;
use crate::nn::{NnError, PolicyHead};

/// Residual denominators are clamped below at this value.
pub const MIN_RESIDUAL_SCALE: f64 = 1e-6;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("noise has {got} dimensions, action space has {expected}")]
    NoiseDim { expected: usize, got: usize },
    #[error("action has {got} dimensions, action space has {expected}")]
    ActionDim { expected: usize, got: usize },
    #[error("history holds {got} entries but the policy order is {expected}")]
    HistoryOrder { expected: usize, got: usize },
    #[error(transparent)]
    Nn(#[from] NnError),
}

/// Anything that yields a mean and standard deviation per action dimension.
pub trait GaussianHead {
    fn act_dim(&self) -> usize;
    fn mean_std(&self, obs: &[f64]) -> Result<(Vec<f64>, Vec<f64>), PolicyError>;
}

impl GaussianHead for PolicyHead {
    fn act_dim(&self) -> usize {
        PolicyHead::act_dim(self)
    }

    fn mean_std(&self, obs: &[f64]) -> Result<(Vec<f64>, Vec<f64>), PolicyError> {
        let out = self.eval(obs)?;
        Ok((out.mean, out.std))
    }
}

/// State-independent mean and scale; models an untrained agent whose
/// networks output constants.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedHead {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FixedHead {
    /// Zero mean, every scale equal to `sigma`.
    pub fn standard(act_dim: usize, sigma: f64) -> Self {
        Self {
            mean: vec![0.0; act_dim],
            std: vec![sigma; act_dim],
        }
    }
}

impl GaussianHead for FixedHead {
    fn act_dim(&self) -> usize {
        self.mean.len()
    }

    fn mean_std(&self, _obs: &[f64]) -> Result<(Vec<f64>, Vec<f64>), PolicyError> {
        Ok((self.mean.clone(), self.std.clone()))
    }
}

/// Diagonal Gaussian over the next action.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ActionDistribution {
    pub fn log_density(&self, action: &[f64]) -> f64 {
        let mut lp = 0.0;
        for ((a, m), s) in action.iter().zip(&self.mean).zip(&self.std) {
            let z = (a - m) / s;
            lp += -0.5 * z * z - s.ln() - 0.5 * LN_2PI;
        }
        lp
    }

    pub fn entropy(&self) -> f64 {
        self.std.iter().map(|s| s.ln() + 0.5 * (LN_2PI + 1.0)).sum()
    }

    fn draw(&self, noise: &[f64]) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.std)
            .zip(noise)
            .map(|((m, s), e)| m + s * e)
            .collect()
    }
}

/// Result of drawing one action.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub action: Vec<f64>,
    pub log_prob: f64,
    /// `(a - mu(s)) / sigma(s)` under the sampling parameters.
    pub residual: Vec<f64>,
    pub dist: ActionDistribution,
}

fn residual(action: &[f64], mean: &[f64], std: &[f64]) -> Vec<f64> {
    action
        .iter()
        .zip(mean)
        .zip(std)
        .map(|((a, m), s)| (a - m) / s.max(MIN_RESIDUAL_SCALE))
        .collect()
}

fn check_dim(expected: usize, got: usize, noise: bool) -> Result<(), PolicyError> {
    if expected == got {
        Ok(())
    } else if noise {
        Err(PolicyError::NoiseDim { expected, got })
    } else {
        Err(PolicyError::ActionDim { expected, got })
    }
}

/// Plain diagonal Gaussian policy `N(mu(s), sigma(s)^2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GaussianPolicy;

impl GaussianPolicy {
    pub fn distribution<H: GaussianHead>(
        &self,
        state: &ExtendedState,
        head: &H,
    ) -> Result<ActionDistribution, PolicyError> {
        let (mean, std) = head.mean_std(state.current())?;
        Ok(ActionDistribution { mean, std })
    }

    pub fn sample<H: GaussianHead>(
        &self,
        state: &ExtendedState,
        head: &H,
        noise: &[f64],
    ) -> Result<Sample, PolicyError> {
        check_dim(head.act_dim(), noise.len(), true)?;
        let dist = self.distribution(state, head)?;
        let action = dist.draw(noise);
        let residual = residual(&action, &dist.mean, &dist.std);
        Ok(Sample {
            log_prob: dist.log_density(&action),
            action,
            residual,
            dist,
        })
    }
}

/// Autoregressive policy driven by a stationary unit-variance AR model.
#[derive(Debug, Clone, PartialEq)]
pub struct ArPolicy {
    model: ArModel,
    /// Use residuals cached at generation time when sampling. Disabling it
    /// recomputes every residual under the current parameters.
    pub cache_residuals: bool,
}

impl ArPolicy {
    pub fn new(model: ArModel) -> Self {
        Self {
            model,
            cache_residuals: true,
        }
    }

    pub fn model(&self) -> &ArModel {
        &self.model
    }

    pub fn order(&self) -> usize {
        self.model.order()
    }

    /// `f = sum_{k <= min(p,t)} phi_k u_{t-k}` per action dimension.
    pub fn history_term<H: GaussianHead>(
        &self,
        state: &ExtendedState,
        head: &H,
        use_cache: bool,
    ) -> Result<Vec<f64>, PolicyError> {
        if state.history_len() > self.order() {
            return Err(PolicyError::HistoryOrder {
                expected: self.order(),
                got: state.history_len(),
            });
        }
        let mut f = vec![0.0; head.act_dim()];
        for (phi, entry) in self.model.coeffs().iter().zip(state.history()) {
            let recomputed;
            let u: &[f64] = match (&entry.residual, use_cache) {
                (Some(cached), true) => cached,
                _ => {
                    let (m, s) = head.mean_std(&entry.obs)?;
                    recomputed = residual(&entry.action, &m, &s);
                    &recomputed
                }
            };
            for (fd, ud) in f.iter_mut().zip(u) {
                *fd += phi * ud;
            }
        }
        Ok(f)
    }

    /// Distribution of the next action; returns it with `mu(s_t)`, `sigma(s_t)`.
    pub fn distribution<H: GaussianHead>(
        &self,
        state: &ExtendedState,
        head: &H,
        use_cache: bool,
    ) -> Result<(ActionDistribution, Vec<f64>, Vec<f64>), PolicyError> {
        let (mu, sigma) = head.mean_std(state.current())?;
        let f = self.history_term(state, head, use_cache)?;
        let sz = self.model.noise_std();
        let mean = mu
            .iter()
            .zip(&sigma)
            .zip(&f)
            .map(|((m, s), fd)| m + s * fd)
            .collect();
        let std = sigma.iter().map(|s| s * sz).collect();
        Ok((ActionDistribution { mean, std }, mu, sigma))
    }

    pub fn sample<H: GaussianHead>(
        &self,
        state: &ExtendedState,
        head: &H,
        noise: &[f64],
    ) -> Result<Sample, PolicyError> {
        check_dim(head.act_dim(), noise.len(), true)?;
        let (dist, mu, sigma) = self.distribution(state, head, self.cache_residuals)?;
        let action = dist.draw(noise);
        let residual = residual(&action, &mu, &sigma);
        Ok(Sample {
            log_prob: dist.log_density(&action),
            action,
            residual,
            dist,
        })
    }
}

/// Either policy family behind one interface.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Gaussian(GaussianPolicy),
    Autoregressive(ArPolicy),
}

impl Policy {
    pub fn gaussian() -> Self {
        Policy::Gaussian(GaussianPolicy)
    }

    pub fn autoregressive(model: ArModel) -> Self {
        Policy::Autoregressive(ArPolicy::new(model))
    }

    /// Length of history the policy consumes.
    pub fn order(&self) -> usize {
        match self {
            Policy::Gaussian(_) => 0,
            Policy::Autoregressive(p) => p.order(),
        }
    }

    pub fn sample<H: GaussianHead>(
        &self,
        state: &ExtendedState,
        head: &H,
        noise: &[f64],
    ) -> Result<Sample, PolicyError> {
        match self {
            Policy::Gaussian(p) => p.sample(state, head, noise),
            Policy::Autoregressive(p) => p.sample(state, head, noise),
        }
    }

    /// Log-density of `action` with every residual recomputed under the
    /// head's current parameters, and its gradient with respect to them.
    pub fn log_prob(
        &self,
        state: &ExtendedState,
        action: &[f64],
        head: &PolicyHead,
    ) -> Result<(f64, Vec<f64>), PolicyError> {
        check_dim(head.act_dim(), action.len(), false)?;
        let data = batch::OwnedTransitions::from_state(state, action);
        let view = data.view();
        let eval = self.log_prob_batch(head, &view, &[0])?;
        let mut grad = vec![0.0; head.num_params()];
        self.log_prob_backward(head, &eval, &[1.0], 0.0, &mut grad)?;
        Ok((eval.logp[0], grad))
    }

    /// Evaluate log-densities for the selected transitions.
    pub fn log_prob_batch(
        &self,
        head: &PolicyHead,
        data: &TransitionView<'_>,
        indices: &[usize],
    ) -> Result<LogProbEval, PolicyError> {
        match self {
            Policy::Gaussian(_) => batch::gaussian_log_prob(head, data, indices),
            Policy::Autoregressive(p) => batch::ar_log_prob(head, p.model(), data, indices),
        }
    }

    /// Accumulate `sum_i dlogp[i] * grad logp_i + entropy_weight * sum_i grad H_i`
    /// into `grad`.
    pub fn log_prob_backward(
        &self,
        head: &PolicyHead,
        eval: &LogProbEval,
        dlogp: &[f64],
        entropy_weight: f64,
        grad: &mut [f64],
    ) -> Result<(), PolicyError> {
        batch::backward(head, eval, dlogp, entropy_weight, grad)
    }
}
