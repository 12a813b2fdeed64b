use rand::seq::SliceRandom;
use rand::Rng;

use super::{gae, normalize, Agent, GaeInput, RolloutBatch, TrainConfig, TrainError};
use crate::nn::Adam;

/// Diagnostics of one optimisation phase, averaged over minibatches.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UpdateStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    /// `0.5 * mean((logp_new - logp_old)^2)`.
    pub approx_kl: f64,
    /// Fraction of samples whose ratio left `[1 - eps, 1 + eps]`.
    pub clipfrac: f64,
    /// `1 - Var(target - V) / Var(target)` of the collection-time values.
    pub explained_var: f64,
    /// Mean `|logp_recomputed - logp_collected|` before the first step:
    /// the gap between cached and recomputed residuals.
    pub logp_drift: f64,
    pub minibatches: usize,
}

/// Loss terms of one minibatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinibatchLoss {
    /// `policy_loss + vf_coef * value_loss - ent_coef * entropy`.
    pub total: f64,
    /// Negated clipped surrogate.
    pub policy_loss: f64,
    /// `0.5 * mean((V - target)^2)`.
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clipfrac: f64,
}

/// Optimiser state carried across updates.
#[derive(Debug, Clone)]
pub struct Ppo {
    pub config: TrainConfig,
    adam: Adam,
}

fn explained_variance(pred: &[f64], target: &[f64]) -> f64 {
    let var = |x: &mut dyn Iterator<Item = f64>, n: usize| {
        let v: Vec<f64> = x.collect();
        let m = v.iter().sum::<f64>() / n as f64;
        v.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / n as f64
    };
    let n = target.len();
    let vt = var(&mut target.iter().copied(), n);
    if vt == 0.0 {
        return f64::NAN;
    }
    1.0 - var(&mut target.iter().zip(pred).map(|(t, p)| t - p), n) / vt
}

impl Ppo {
    pub fn new(config: TrainConfig, agent: &Agent) -> Result<Self, TrainError> {
        config.validate()?;
        let adam = Adam::new(agent.num_params(), config.step_size);
        Ok(Self { config, adam })
    }

    pub fn optimizer_steps(&self) -> u64 {
        self.adam.steps()
    }

    /// Advantages (normalised) and value targets of a batch.
    pub fn advantages(&self, batch: &RolloutBatch) -> (Vec<f64>, Vec<f64>) {
        let input = GaeInput {
            rewards: &batch.rewards,
            values: &batch.values,
            dones: &batch.dones,
            timeouts: &batch.timeouts,
            bootstrap: &batch.bootstrap_values,
            last_value: batch.last_value,
        };
        let (adv, targets) = gae(&input, self.config.gamma, self.config.lambda);
        (normalize(&adv), targets)
    }

    /// Run `opt_epochs` epochs of shuffled minibatch steps on `batch`.
    pub fn update<R: Rng + ?Sized>(
        &mut self,
        agent: &mut Agent,
        batch: &RolloutBatch,
        rng: &mut R,
    ) -> Result<UpdateStats, TrainError> {
        let (adv, targets) = self.advantages(batch);
        let n = batch.len();
        let view = batch.view();
        let cfg = self.config.clone();
        let mut stats = UpdateStats {
            explained_var: explained_variance(&batch.values, &targets),
            ..Default::default()
        };

        let all: Vec<usize> = (0..n).collect();
        let mut drift = 0.0;
        for chunk in all.chunks(cfg.opt_batch) {
            let eval = agent.policy.log_prob_batch(&agent.head, &view, chunk)?;
            for (lp, &i) in eval.logp.iter().zip(chunk) {
                drift += (lp - batch.log_probs[i]).abs();
            }
        }
        stats.logp_drift = drift / n.max(1) as f64;

        let mut order = all;
        let mut grad = vec![0.0; agent.num_params()];
        for epoch in 0..cfg.opt_epochs {
            order.shuffle(rng);
            for (mb, idx) in order.chunks(cfg.opt_batch).enumerate() {
                let mbl = self.loss_and_grad(agent, batch, &adv, &targets, idx, &mut grad)?;
                let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                if !mbl.total.is_finite() || !norm.is_finite() {
                    return Err(TrainError::NonFinite {
                        epoch,
                        minibatch: mb,
                        policy_loss: mbl.policy_loss,
                        value_loss: mbl.value_loss,
                        grad_norm: norm,
                    });
                }
                if cfg.max_grad_norm > 0.0 && norm > cfg.max_grad_norm {
                    let s = cfg.max_grad_norm / norm;
                    grad.iter_mut().for_each(|g| *g *= s);
                }
                let mut params = agent.params();
                self.adam.step(&mut params, &grad);
                agent.set_params(&params)?;

                stats.policy_loss += mbl.policy_loss;
                stats.value_loss += mbl.value_loss;
                stats.entropy += mbl.entropy;
                stats.approx_kl += mbl.approx_kl;
                stats.clipfrac += mbl.clipfrac;
                stats.minibatches += 1;
            }
        }
        if stats.minibatches > 0 {
            let k = stats.minibatches as f64;
            stats.policy_loss /= k;
            stats.value_loss /= k;
            stats.entropy /= k;
            stats.approx_kl /= k;
            stats.clipfrac /= k;
        }
        Ok(stats)
    }

    /// Loss of one minibatch and its gradient with respect to
    /// [`Agent::params`], written into `grad`.
    ///
    /// `adv` and `targets` are indexed by batch step, as returned by
    /// [`Ppo::advantages`].
    pub fn loss_and_grad(
        &self,
        agent: &Agent,
        batch: &RolloutBatch,
        adv: &[f64],
        targets: &[f64],
        idx: &[usize],
        grad: &mut [f64],
    ) -> Result<MinibatchLoss, TrainError> {
        let cfg = &self.config;
        let view = batch.view();
        let nh = agent.head.num_params();
        let m = idx.len() as f64;
        let eval = agent.policy.log_prob_batch(&agent.head, &view, idx)?;
        let mut dlogp = vec![0.0; idx.len()];
        let (mut pg, mut kl, mut clipped, mut ent) = (0.0, 0.0, 0.0, 0.0);
        for (q, &i) in idx.iter().enumerate() {
            let diff = eval.logp[q] - batch.log_probs[i];
            let ratio = diff.exp();
            let a = adv[i];
            let unclipped = ratio * a;
            let clipped_obj = ratio.clamp(1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * a;
            // Only the unclipped branch depends on the parameters.
            if unclipped <= clipped_obj {
                pg -= unclipped;
                dlogp[q] = -unclipped / m;
            } else {
                pg -= clipped_obj;
            }
            kl += 0.5 * diff * diff;
            if (ratio - 1.0).abs() > cfg.clip_eps {
                clipped += 1.0;
            }
            ent += eval.entropy[q];
        }

        let od = batch.obs_dim;
        let mut rows = Vec::with_capacity(idx.len() * od);
        for &i in idx {
            rows.extend_from_slice(view.obs_row(i));
        }
        let tape = agent.value.forward_batch(&rows, idx.len())?;
        let mut dv = vec![0.0; idx.len()];
        let mut vloss = 0.0;
        for (q, &i) in idx.iter().enumerate() {
            let err = tape.output()[q] - targets[i];
            vloss += 0.5 * err * err / m;
            dv[q] = cfg.vf_coef * err / m;
        }

        grad.iter_mut().for_each(|g| *g = 0.0);
        agent
            .policy
            .log_prob_backward(&agent.head, &eval, &dlogp, -cfg.ent_coef / m, &mut grad[..nh])?;
        agent.value.backward_batch(&tape, &dv, &mut grad[nh..], false)?;
        let (policy_loss, entropy) = (pg / m, ent / m);
        Ok(MinibatchLoss {
            total: policy_loss + cfg.vf_coef * vloss - cfg.ent_coef * entropy,
            policy_loss,
            value_loss: vloss,
            entropy,
            approx_kl: kl / m,
            clipfrac: clipped / m,
        })
    }
}
