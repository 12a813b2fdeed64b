//! Desk-scale experiments: process realisations, autocorrelation curves,
//! random-agent exploration, fixed-length trajectories and learning curves
//! on Square. Every experiment is deterministic given its seeds and writes
//! versioned CSV.

mod config;
mod csvio;
mod explore;
mod learning;
mod trajectories;

pub use config::{AcfSection, ExperimentConfig, ExploreSection, LearnSection, NoiseSection, TrajectoriesSection};
pub use csvio::{
    write_acf, write_exploration, write_learning, write_noise, write_trajectories, CsvOut, CSV_VERSION_LINE,
};
pub use explore::{explore_cell, run_exploration, CellResult, ExplorationReport, DEFAULT_EXPLORE_BUDGET, DEFAULT_RATES};
pub use learning::{run_learning, LearningResult, DEFAULT_LEARN_SECONDS, DEFAULT_LEARN_SEEDS};
pub use trajectories::{bounding_box_area, run_trajectories, TrajectoryPoint};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ar::{ArError, ArModel};
use crate::env::EnvError;
use crate::nn::NnError;
use crate::policy::{Policy, PolicyError};
use crate::trainer::TrainError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bad policy spec {0:?}: expected `gaussian` or `arp:<p>:<alpha>`")]
    Spec(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Ar(#[from] ArError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which policy family an experiment runs, written `gaussian` or
/// `arp:<p>:<alpha>` (binomial process with `p` equal roots `alpha`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    Gaussian,
    Arp { p: usize, alpha: f64 },
}

impl PolicySpec {
    pub fn arp(p: usize, alpha: f64) -> Self {
        PolicySpec::Arp { p, alpha }
    }

    pub fn build(&self) -> Result<Policy, BenchError> {
        Ok(match *self {
            PolicySpec::Gaussian => Policy::gaussian(),
            PolicySpec::Arp { p, alpha } => Policy::autoregressive(ArModel::binomial(p, alpha)?),
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Gaussian => write!(f, "gaussian"),
            PolicySpec::Arp { p, alpha } => write!(f, "arp:{p}:{alpha}"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BenchError::Spec(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        if t == "gaussian" {
            return Ok(PolicySpec::Gaussian);
        }
        let mut parts = t.split(':');
        if parts.next() != Some("arp") {
            return Err(bad());
        }
        let p = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let alpha: f64 = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        // validate eagerly so a typo fails before any work starts
        ArModel::binomial(p, alpha)?;
        Ok(PolicySpec::Arp { p, alpha })
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = BenchError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(s: PolicySpec) -> Self {
        s.to_string()
    }
}
