use nalgebra::{Complex, DMatrix, DVector};

use super::ArError;

type Complex64 = Complex<f64>;

/// Largest supported process order.
pub const MAX_ORDER: usize = 32;

/// Companion eigenvalues must have modulus below `1 - STATIONARITY_MARGIN`.
pub const STATIONARITY_MARGIN: f64 = 1e-9;

/// Yule-Walker systems with a larger condition number are rejected.
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

fn check_order(p: usize) -> Result<(), ArError> {
    if p == 0 {
        return Err(ArError::EmptyOrder);
    }
    if p > MAX_ORDER {
        return Err(ArError::OrderTooLarge(p));
    }
    Ok(())
}

fn check_root(index: usize, value: f64) -> Result<(), ArError> {
    if !(0.0..1.0).contains(&value) {
        return Err(ArError::RootOutOfRange { index, value });
    }
    Ok(())
}

/// AR coefficients whose characteristic polynomial has exactly the given roots.
///
/// The monic polynomial `prod (z - a_i)` is expanded one factor at a time;
/// the coefficient of `z^{p-k}` is `-phi_k`, so `phi_k = (-1)^{k+1} e_k(roots)`.
pub fn coeffs_from_roots(roots: &[f64]) -> Result<Vec<f64>, ArError> {
    check_order(roots.len())?;
    for (i, &a) in roots.iter().enumerate() {
        check_root(i, a)?;
    }
    // poly[j] is the coefficient of z^{n-j} after n factors.
    let mut poly = Vec::with_capacity(roots.len() + 1);
    poly.push(1.0);
    for &a in roots {
        poly.push(0.0);
        for j in (1..poly.len()).rev() {
            poly[j] -= a * poly[j - 1];
        }
    }
    Ok(poly[1..].iter().map(|c| -c).collect())
}

/// Coefficients of the equal-root subfamily: `phi_k = (-1)^{k+1} C(p,k) alpha^k`.
pub fn coeffs_binomial(p: usize, alpha: f64) -> Result<Vec<f64>, ArError> {
    check_order(p)?;
    check_root(0, alpha)?;
    let mut out = Vec::with_capacity(p);
    let mut binom = 1.0_f64;
    let mut power = 1.0_f64;
    for k in 1..=p {
        binom = binom * (p - k + 1) as f64 / k as f64;
        power *= alpha;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out.push(sign * binom * power);
    }
    Ok(out)
}

/// Autocovariances and innovation variance of the unit-variance process.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarySolution {
    /// `gamma_1..gamma_p` (with `gamma_0 = 1` implied).
    pub autocov: Vec<f64>,
    pub noise_var: f64,
    pub condition_number: f64,
}

/// Build the linear system `A gamma = b` for the unknowns `gamma_1..gamma_p`.
///
/// Row `j` (1-based) of the Yule-Walker equations reads
/// `gamma_j = sum_k phi_k gamma_{|j-k|}`. The `k = j` term hits `gamma_0 = 1`
/// and moves to the right-hand side; every other term is subtracted from the
/// column of lag `|j-k|`, which merges the two `phi` entries that land on the
/// same lag.
pub(crate) fn yule_walker_system(coeffs: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let p = coeffs.len();
    let mut a = DMatrix::<f64>::identity(p, p);
    let mut b = DVector::<f64>::zeros(p);
    for j in 1..=p {
        for k in 1..=p {
            let phi = coeffs[k - 1];
            if k == j {
                b[j - 1] += phi;
            } else {
                let lag = j.abs_diff(k);
                a[(j - 1, lag - 1)] -= phi;
            }
        }
    }
    (a, b)
}

/// Solve the Yule-Walker system with `gamma_0 = 1`.
///
/// Returns `gamma_1..gamma_p` together with `sigma_Z^2 = 1 - sum phi_i gamma_i`.
/// The coefficients must describe a stationary process; the system is
/// rejected when its 2-norm condition number exceeds
/// [`MAX_CONDITION_NUMBER`] or the resulting variance is not positive.
pub fn solve_stationary(coeffs: &[f64]) -> Result<StationarySolution, ArError> {
    check_order(coeffs.len())?;
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(ArError::NonFinite);
    }
    let (a, b) = yule_walker_system(coeffs);
    let singular = a.clone().singular_values();
    let smax = singular.max();
    let smin = singular.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition_number <= MAX_CONDITION_NUMBER) {
        return Err(ArError::NearNonstationary { condition_number });
    }
    let gamma = a
        .lu()
        .solve(&b)
        .ok_or(ArError::NearNonstationary { condition_number })?;
    let autocov: Vec<f64> = gamma.iter().copied().collect();
    let noise_var = 1.0 - coeffs.iter().zip(&autocov).map(|(p, g)| p * g).sum::<f64>();
    if !(noise_var > 0.0) {
        return Err(ArError::InvalidCoefficients { noise_var });
    }
    Ok(StationarySolution {
        autocov,
        noise_var,
        condition_number,
    })
}

/// Companion matrix of `z^p - sum phi_i z^{p-i}` (first row holds the coefficients).
pub fn companion_matrix(coeffs: &[f64]) -> DMatrix<f64> {
    let p = coeffs.len();
    let mut m = DMatrix::<f64>::zeros(p, p);
    for (k, &c) in coeffs.iter().enumerate() {
        m[(0, k)] = c;
    }
    for i in 1..p {
        m[(i, i - 1)] = 1.0;
    }
    m
}

/// Roots of the characteristic polynomial, computed as companion-matrix
/// eigenvalues (real Schur form via shifted QR iterations).
pub fn characteristic_roots(coeffs: &[f64]) -> Vec<Complex64> {
    if coeffs.is_empty() {
        return Vec::new();
    }
    if coeffs.len() == 1 {
        return vec![Complex64::new(coeffs[0], 0.0)];
    }
    companion_matrix(coeffs)
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// True iff every characteristic root lies strictly inside the unit circle
/// (with a margin of [`STATIONARITY_MARGIN`]).
pub fn is_stationary(coeffs: &[f64]) -> bool {
    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
        return false;
    }
    characteristic_roots(coeffs)
        .iter()
        .all(|z| z.norm() < 1.0 - STATIONARITY_MARGIN)
}

/// A validated stationary AR-p process with standard normal marginals.
///
/// Immutable once built; share it freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    roots: Vec<f64>,
    coeffs: Vec<f64>,
    noise_var: f64,
    noise_std: f64,
    autocov: Vec<f64>,
}

impl ArModel {
    /// General member of the family: one root per lag.
    pub fn from_roots(roots: &[f64]) -> Result<Self, ArError> {
        let coeffs = coeffs_from_roots(roots)?;
        Self::build(roots.to_vec(), coeffs)
    }

    /// Equal-root subfamily parametrised by a single smoothing parameter.
    pub fn binomial(p: usize, alpha: f64) -> Result<Self, ArError> {
        let coeffs = coeffs_binomial(p, alpha)?;
        Self::build(vec![alpha; p], coeffs)
    }

    /// Order-`p` model that degenerates to white Gaussian noise.
    pub fn white_noise(p: usize) -> Result<Self, ArError> {
        Self::binomial(p, 0.0)
    }

    fn build(roots: Vec<f64>, coeffs: Vec<f64>) -> Result<Self, ArError> {
        let sol = solve_stationary(&coeffs)?;
        let mut autocov = Vec::with_capacity(coeffs.len() + 1);
        autocov.push(1.0);
        autocov.extend_from_slice(&sol.autocov);
        Ok(Self {
            roots,
            coeffs,
            noise_var: sol.noise_var,
            noise_std: sol.noise_var.sqrt(),
            autocov,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// `gamma_0..gamma_p`, with `gamma_0 = 1`.
    pub fn autocov(&self) -> &[f64] {
        &self.autocov
    }

    /// Largest root; governs how long correlations linger.
    pub fn max_root(&self) -> f64 {
        self.roots.iter().copied().fold(0.0, f64::max)
    }

    /// Steps to discard before statistics: `10 / (1 - max root)`.
    pub fn burn_in(&self) -> usize {
        (10.0 / (1.0 - self.max_root())).ceil() as usize
    }

    pub fn is_white_noise(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }
}
