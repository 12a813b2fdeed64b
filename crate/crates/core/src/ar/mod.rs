//! Stationary AR-p Gaussian processes with standard normal marginals.
//!
//! Coefficients come from characteristic roots in `[0, 1)`; the innovation
//! variance is obtained from the Yule-Walker system with `gamma_0 = 1`, so
//! every realisation has unit stationary variance regardless of order or
//! smoothness.

mod acf;
mod model;
mod process;

pub use acf::{
    acf, alpha_for_rho1, binomial_rho1, AcfTable, BISECTION_MAX_ITERS, BISECTION_TOL,
};
pub use model::{
    characteristic_roots, coeffs_binomial, coeffs_from_roots, companion_matrix, is_stationary,
    solve_stationary, ArModel, StationarySolution, MAX_CONDITION_NUMBER, MAX_ORDER,
    STATIONARITY_MARGIN,
};
pub use process::{sample_path, ProcessState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArError {
    #[error("process order must be at least 1")]
    EmptyOrder,
    #[error("process order {0} exceeds the supported maximum of {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("root #{index} = {value} is outside [0, 1)")]
    RootOutOfRange { index: usize, value: f64 },
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("near-nonstationary model (condition number {condition_number:.3e})")]
    NearNonstationary { condition_number: f64 },
    #[error("invalid coefficients: innovation variance {noise_var} is not positive")]
    InvalidCoefficients { noise_var: f64 },
    #[error("target lag-1 autocorrelation {0} is outside [0, 1)")]
    TargetOutOfRange(f64),
    #[error("bisection for rho_1 = {target} did not converge in {iterations} iterations")]
    BisectionDiverged { target: f64, iterations: usize },
}
