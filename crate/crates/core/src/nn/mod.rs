//! Small tanh MLPs with exact reverse-mode gradients, the Gaussian policy
//! head built on them, Adam, and checkpoint files.

mod adam;
mod checkpoint;
mod head;
mod mlp;

pub use adam::Adam;
pub use checkpoint::{Checkpoint, CheckpointHeader, LogStdHeader, CHECKPOINT_FORMAT};
pub use head::{HeadOutput, HeadTape, LogStd, PolicyHead, LOG_STD_MAX, LOG_STD_MIN, MEAN_OUTPUT_GAIN};
pub use mlp::{
    check_gradient, param_count, GradientCheck, Gradients, Mlp, Tape, FD_STEP, REL_ERROR_FLOOR,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("invalid layer sizes {0:?}")]
    BadLayerSizes(Vec<usize>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter vector has length {got}, expected {expected}")]
    ParamLength { expected: usize, got: usize },
    #[error("backward called before a forward pass was recorded")]
    NoForwardPass,
    #[error("tape does not belong to this network")]
    TapeMismatch,
    #[error("mean and log-std parts disagree on dimensions")]
    HeadMismatch,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
