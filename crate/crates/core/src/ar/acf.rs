use serde::Serialize;

use super::{ArError, ArModel};

/// Autocorrelation values `rho_0..rho_max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfTable {
    pub max_lag: usize,
    pub rho: Vec<f64>,
}

impl AcfTable {
    pub fn at(&self, lag: usize) -> Option<f64> {
        self.rho.get(lag).copied()
    }
}

/// Analytic autocorrelation of a model.
///
/// Lags up to `p` come straight from the Yule-Walker solution; longer lags
/// follow `gamma_tau = sum_k phi_k gamma_{tau-k}`. Since `gamma_0 = 1` the
/// autocovariance is already the autocorrelation.
pub fn acf(model: &ArModel, max_lag: usize) -> AcfTable {
    let p = model.order();
    let phi = model.coeffs();
    let mut rho = Vec::with_capacity(max_lag + 1);
    rho.extend(model.autocov().iter().take(max_lag + 1));
    for tau in rho.len()..=max_lag {
        let g: f64 = (1..=p).map(|k| phi[k - 1] * rho[tau - k]).sum();
        rho.push(g);
    }
    AcfTable { max_lag, rho }
}

/// Lag-1 autocorrelation of the binomial model of order `p`.
pub fn binomial_rho1(p: usize, alpha: f64) -> Result<f64, ArError> {
    Ok(ArModel::binomial(p, alpha)?.autocov()[1])
}

pub const BISECTION_MAX_ITERS: usize = 200;
pub const BISECTION_TOL: f64 = 1e-9;

/// Smoothing parameter of the order-`p` binomial model whose lag-1
/// autocorrelation equals `target_rho1`.
///
/// Bisection on `alpha in [0, 1)`, relying on `rho_1` increasing with
/// `alpha`. Models too close to the unit root to solve count as lying
/// above any admissible target.
pub fn alpha_for_rho1(p: usize, target_rho1: f64) -> Result<f64, ArError> {
    if !(0.0..1.0).contains(&target_rho1) {
        return Err(ArError::TargetOutOfRange(target_rho1));
    }
    if target_rho1 == 0.0 {
        // rho_1 = 0 only for white noise; still validates p.
        binomial_rho1(p, 0.0)?;
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let rho1 = match binomial_rho1(p, mid) {
            Ok(r) => r,
            Err(ArError::NearNonstationary { .. }) | Err(ArError::InvalidCoefficients { .. }) => {
                hi = mid;
                continue;
            }
            Err(e) => return Err(e),
        };
        if (rho1 - target_rho1).abs() < BISECTION_TOL {
            return Ok(mid);
        }
        if rho1 < target_rho1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(ArError::BisectionDiverged {
        target: target_rho1,
        iterations: BISECTION_MAX_ITERS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn white_noise_acf() {
        let t = acf(&ArModel::white_noise(3).unwrap(), 20);
        assert_eq!(t.rho.len(), 21);
        assert_eq!(t.rho[0], 1.0);
        assert!(t.rho[1..].iter().all(|&r| r == 0.0));
    }

    #[test]
    fn ar1_acf_is_geometric() {
        let t = acf(&ArModel::binomial(1, 0.99).unwrap(), 10);
        assert_abs_diff_eq!(t.rho[10], 0.99_f64.powi(10), epsilon = 1e-12);
        assert_abs_diff_eq!(t.rho[10], 0.9044, epsilon = 1e-4);
    }

    #[test]
    fn max_lag_below_order() {
        let m = ArModel::binomial(5, 0.5).unwrap();
        let t = acf(&m, 2);
        assert_eq!(t.rho, m.autocov()[..3].to_vec());
        assert_eq!(acf(&m, 0).rho, vec![1.0]);
    }

    #[test]
    fn alpha_for_rho1_trivial_cases() {
        assert_abs_diff_eq!(alpha_for_rho1(1, 0.99).unwrap(), 0.99, epsilon = 1e-9);
        for p in 1..=5 {
            assert_eq!(alpha_for_rho1(p, 0.0).unwrap(), 0.0);
        }
        assert!(alpha_for_rho1(3, 1.0).is_err());
        assert!(alpha_for_rho1(3, -0.1).is_err());
    }

    #[test]
    fn alpha_for_rho1_order_three() {
        // Independent check: impulse-response autocorrelation of the binomial
        // AR-3 gives rho_1 = 0.99 at alpha = 0.78494444 (to 8 digits).
        let a = alpha_for_rho1(3, 0.99).unwrap();
        assert!((a - 0.784_944_44).abs() < 1e-7, "{a}");
        assert!((binomial_rho1(3, a).unwrap() - 0.99).abs() < 1e-9);
    }
}
