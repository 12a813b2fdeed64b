//! Stationary autoregressive exploration for continuous control.
//!
//! Exploration noise is drawn from an order-`p` autoregressive process whose
//! characteristic roots all equal `alpha`, scaled so that its marginal
//! distribution stays standard normal at any `alpha`. The crate provides:
//!
//! - [`ar`]: the process itself, with coefficients, Yule-Walker solution,
//!   autocorrelation and sampling.
//! - [`policy`]: Gaussian and autoregressive Gaussian policies over an
//!   extended state that carries the last `p` observations and actions.
//! - [`nn`]: small MLPs with reverse-mode gradients, the policy head, Adam
//!   and a checkpoint format.
//! - [`env`]: the Square target-reaching task and a history wrapper.
//! - [`trainer`]: rollout collection, GAE and clipped PPO.
//! - [`bench`]: exploration, trajectory and learning experiments with CSV
//!   output, as driven by the `arpex` binary.
//!
//! ```
//! use arpex::ar::{acf, alpha_for_rho1, ArModel};
//!
//! let alpha = alpha_for_rho1(3, 0.99).unwrap();
//! let model = ArModel::binomial(3, alpha).unwrap();
//! let rho = acf(&model, 10).rho;
//! assert!((rho[1] - 0.99).abs() < 1e-9);
//! ```

pub mod ar;
pub mod env;
pub mod nn;
pub mod policy;
pub mod trainer;
pub mod bench;
