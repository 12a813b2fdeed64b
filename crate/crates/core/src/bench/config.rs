use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{BenchError, PolicySpec};
use crate::trainer::TrainConfig;

/// Experiment settings read from a TOML file. Every key is optional;
/// command-line flags take precedence over the file, and the file over
/// built-in defaults.
///
/// ```toml
/// seed = 42
///
/// [noise]
/// p = 3
/// alpha = 0.8
/// steps = 1000
///
/// [acf]
/// p = 3
/// rho1 = 0.99
/// max_lag = 600
///
/// [explore]
/// rates = [5, 10, 25, 50, 100]
/// policies = ["gaussian", "arp:3:0.95"]
/// budget = 1e5
/// sigma_scale = 1.0
/// seeds = [0]
///
/// [trajectories]
/// rate = 100
/// policy = "arp:3:0.95"
/// sigma_scale = 1.0
/// duration = 10
/// runs = 5
///
/// [learn]
/// rate = 10
/// policy = "arp:3:0.8"
/// sim_seconds = 50000
/// seeds = 5
///
/// [train]
/// step_size = 4e-3
/// ```
///
/// `[train]` accepts the keys of [`TrainConfig`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub noise: NoiseSection,
    pub acf: AcfSection,
    pub explore: ExploreSection,
    pub trajectories: TrajectoriesSection,
    pub learn: LearnSection,
    pub train: TrainConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub p: Option<usize>,
    pub alpha: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcfSection {
    pub p: Option<usize>,
    pub rho1: Option<f64>,
    pub alpha: Option<f64>,
    pub max_lag: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExploreSection {
    pub rates: Option<Vec<f64>>,
    pub policies: Option<Vec<PolicySpec>>,
    pub budget: Option<f64>,
    pub sigma_scale: Option<f64>,
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoriesSection {
    pub rate: Option<f64>,
    pub policy: Option<PolicySpec>,
    pub sigma_scale: Option<f64>,
    pub duration: Option<f64>,
    pub runs: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnSection {
    pub rate: Option<f64>,
    pub policy: Option<PolicySpec>,
    pub sim_seconds: Option<f64>,
    pub seeds: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, BenchError> {
        let cfg: Self = toml::from_str(s).map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.train.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text)
    }
}
