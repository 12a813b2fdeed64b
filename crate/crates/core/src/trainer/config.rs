use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TrainError;

/// Rate at which the base batch sizes apply.
pub const BASE_ACTION_RATE: f64 = 10.0;

/// PPO hyper-parameters.
///
/// Defaults are the Square values at 10 Hz. At other action rates the batch
/// and optimisation-batch sizes scale with the rate so that a batch always
/// spans the same amount of simulated time (see [`TrainConfig::for_rate`]).
///
/// Config files are TOML with the field names below; any field may be
/// omitted:
///
/// ```toml
/// batch_size = 8192
/// opt_batch = 256
/// opt_epochs = 10
/// step_size = 4e-3
/// gamma = 0.995
/// lambda = 0.995
/// clip_eps = 0.2
/// hidden = [64, 64]
/// vf_coef = 0.5
/// max_grad_norm = 0.5
/// ent_coef = 0.0
/// state_dependent_std = false
/// cache_residuals = true
/// episode_cap_seconds = 1000.0
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub opt_batch: usize,
    pub opt_epochs: usize,
    pub step_size: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub clip_eps: f64,
    pub hidden: Vec<usize>,
    pub vf_coef: f64,
    /// Global gradient-norm clip; `0` disables clipping.
    pub max_grad_norm: f64,
    pub ent_coef: f64,
    pub state_dependent_std: bool,
    /// Sample with residuals cached at generation time. When false every
    /// residual is recomputed under the current parameters.
    pub cache_residuals: bool,
    pub episode_cap_seconds: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 8192,
            opt_batch: 256,
            opt_epochs: 10,
            step_size: 4e-3,
            gamma: 0.995,
            lambda: 0.995,
            clip_eps: 0.2,
            hidden: vec![64, 64],
            vf_coef: 0.5,
            max_grad_norm: 0.5,
            ent_coef: 0.0,
            state_dependent_std: false,
            cache_residuals: true,
            episode_cap_seconds: 1000.0,
        }
    }
}

impl TrainConfig {
    /// Scale both batch sizes by `rate / 10 Hz`.
    pub fn for_rate(&self, action_rate: f64) -> Self {
        let factor = action_rate / BASE_ACTION_RATE;
        let scale = |n: usize| ((n as f64 * factor).round() as usize).max(1);
        Self {
            batch_size: scale(self.batch_size),
            opt_batch: scale(self.opt_batch),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma must lie in (0, 1]");
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return bad("lambda must lie in (0, 1]");
        }
        if !(self.clip_eps > 0.0) {
            return bad("clip_eps must be positive");
        }
        if self.batch_size == 0 || self.opt_batch == 0 {
            return bad("batch sizes must be positive");
        }
        if !(self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if self.max_grad_norm < 0.0 || self.vf_coef < 0.0 {
            return bad("vf_coef and max_grad_norm must be non-negative");
        }
        if !(self.episode_cap_seconds > 0.0) {
            return bad("episode_cap_seconds must be positive");
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<Self, TrainError> {
        let cfg: Self = toml::from_str(s).map_err(|e| TrainError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TrainError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| TrainError::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = TrainConfig::default();
        c.validate().unwrap();
        assert_eq!(c.batch_size, 8192);
        assert_eq!(c.hidden, vec![64, 64]);
    }

    #[test]
    fn batch_scales_with_rate() {
        let c = TrainConfig::default().for_rate(100.0);
        assert_eq!(c.batch_size, 81920);
        assert_eq!(c.opt_batch, 2560);
        assert_eq!(c.opt_epochs, 10);
        let c = TrainConfig::default().for_rate(5.0);
        assert_eq!(c.batch_size, 4096);
    }

    #[test]
    fn toml_overrides() {
        let c = TrainConfig::from_toml_str("gamma = 0.99\nhidden = [32]\n").unwrap();
        assert_eq!(c.gamma, 0.99);
        assert_eq!(c.hidden, vec![32]);
        assert_eq!(c.lambda, 0.995);
        assert!(TrainConfig::from_toml_str("gamma = 1.5").is_err());
        assert!(TrainConfig::from_toml_str("clip_eps = 0.0").is_err());
        assert!(TrainConfig::from_toml_str("nonsense = 1").is_err());
    }
}
