//! Batched log-densities with gradients that flow through every occurrence
//! of the mean and scale networks, including the history terms.

use super::{ExtendedState, PolicyError, LN_2PI, MIN_RESIDUAL_SCALE};
use crate::ar::ArModel;
use crate::nn::{HeadTape, PolicyHead};

/// Borrowed, flattened transitions: current observation and action per step
/// plus a variable-length history (most recent first) per step.
#[derive(Debug, Clone, Copy)]
pub struct TransitionView<'a> {
    pub obs_dim: usize,
    pub act_dim: usize,
    /// `n x obs_dim`
    pub obs: &'a [f64],
    /// `n x act_dim`
    pub actions: &'a [f64],
    /// History of step `i` occupies entries `hist_offsets[i]..hist_offsets[i+1]`.
    pub hist_offsets: &'a [usize],
    pub hist_obs: &'a [f64],
    pub hist_actions: &'a [f64],
}

impl<'a> TransitionView<'a> {
    pub fn len(&self) -> usize {
        self.hist_offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn obs_row(&self, i: usize) -> &'a [f64] {
        &self.obs[i * self.obs_dim..(i + 1) * self.obs_dim]
    }

    pub fn action_row(&self, i: usize) -> &'a [f64] {
        &self.actions[i * self.act_dim..(i + 1) * self.act_dim]
    }

    pub fn history_range(&self, i: usize) -> std::ops::Range<usize> {
        self.hist_offsets[i]..self.hist_offsets[i + 1]
    }
}

/// Owned single-transition storage used by [`super::Policy::log_prob`].
pub(super) struct OwnedTransitions {
    obs_dim: usize,
    act_dim: usize,
    obs: Vec<f64>,
    actions: Vec<f64>,
    offsets: Vec<usize>,
    hist_obs: Vec<f64>,
    hist_actions: Vec<f64>,
}

impl OwnedTransitions {
    pub(super) fn from_state(state: &ExtendedState, action: &[f64]) -> Self {
        let mut hist_obs = Vec::new();
        let mut hist_actions = Vec::new();
        for e in state.history() {
            hist_obs.extend_from_slice(&e.obs);
            hist_actions.extend_from_slice(&e.action);
        }
        Self {
            obs_dim: state.current().len(),
            act_dim: action.len(),
            obs: state.current().to_vec(),
            actions: action.to_vec(),
            offsets: vec![0, state.history_len()],
            hist_obs,
            hist_actions,
        }
    }

    pub(super) fn view(&self) -> TransitionView<'_> {
        TransitionView {
            obs_dim: self.obs_dim,
            act_dim: self.act_dim,
            obs: &self.obs,
            actions: &self.actions,
            hist_offsets: &self.offsets,
            hist_obs: &self.hist_obs,
            hist_actions: &self.hist_actions,
        }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Gaussian,
    Autoregressive { coeffs: Vec<f64>, noise_std: f64 },
}

/// Log-densities of a set of transitions plus what the reverse pass needs.
#[derive(Debug, Clone)]
pub struct LogProbEval {
    pub logp: Vec<f64>,
    /// Differential entropy of each action distribution.
    pub entropy: Vec<f64>,
    kind: Kind,
    dim: usize,
    tape: HeadTape,
    /// Head row of each query's current observation.
    current_row: Vec<usize>,
    /// Per query, a range into `hist_terms`.
    hist_rows: Vec<std::ops::Range<usize>>,
    /// `(head row, lag index k)` of every history term that carries a
    /// nonzero coefficient.
    hist_terms: Vec<(usize, usize)>,
    /// Standardised action `(a - mean) / std` per query.
    z: Vec<f64>,
    /// History term per query.
    f: Vec<f64>,
    /// Residual per history row (indexed by head row).
    u: Vec<f64>,
}

pub(super) fn gaussian_log_prob(
    head: &PolicyHead,
    data: &TransitionView<'_>,
    indices: &[usize],
) -> Result<LogProbEval, PolicyError> {
    let (od, d) = (data.obs_dim, data.act_dim);
    let mut rows = Vec::with_capacity(indices.len() * od);
    for &i in indices {
        rows.extend_from_slice(data.obs_row(i));
    }
    let tape = head.forward_batch(&rows, indices.len())?;
    let mut logp = Vec::with_capacity(indices.len());
    let mut entropy = Vec::with_capacity(indices.len());
    let mut z = Vec::with_capacity(indices.len() * d);
    for (q, &i) in indices.iter().enumerate() {
        let mu = tape.mean_row(q);
        let ls = tape.log_std_row(q);
        let a = data.action_row(i);
        let mut lp = 0.0;
        let mut h = 0.0;
        for k in 0..d {
            let zk = (a[k] - mu[k]) / ls[k].exp();
            lp += -0.5 * zk * zk - ls[k] - 0.5 * LN_2PI;
            h += ls[k] + 0.5 * (LN_2PI + 1.0);
            z.push(zk);
        }
        logp.push(lp);
        entropy.push(h);
    }
    Ok(LogProbEval {
        logp,
        entropy,
        kind: Kind::Gaussian,
        dim: d,
        tape,
        current_row: (0..indices.len()).collect(),
        hist_rows: vec![0..0; indices.len()],
        hist_terms: Vec::new(),
        z,
        f: vec![0.0; indices.len() * d],
        u: Vec::new(),
    })
}

pub(super) fn ar_log_prob(
    head: &PolicyHead,
    model: &ArModel,
    data: &TransitionView<'_>,
    indices: &[usize],
) -> Result<LogProbEval, PolicyError> {
    let (od, d) = (data.obs_dim, data.act_dim);
    let coeffs = model.coeffs().to_vec();
    let sz = model.noise_std();
    let ln_sz = sz.ln();

    // Gather current and history observations into one forward pass. Lags
    // with a zero coefficient contribute nothing and are left out, which
    // keeps the white-noise process exactly equal to the Gaussian policy.
    let mut rows = Vec::new();
    let mut current_row = Vec::with_capacity(indices.len());
    let mut hist_rows = Vec::with_capacity(indices.len());
    let mut hist_terms = Vec::new();
    let mut hist_entries = Vec::new();
    let mut n = 0;
    for &i in indices {
        let hr = data.history_range(i);
        if hr.len() > coeffs.len() {
            return Err(PolicyError::HistoryOrder {
                expected: coeffs.len(),
                got: hr.len(),
            });
        }
        rows.extend_from_slice(data.obs_row(i));
        current_row.push(n);
        n += 1;
        let start = hist_terms.len();
        for (k, entry) in hr.enumerate() {
            if coeffs[k] == 0.0 {
                continue;
            }
            rows.extend_from_slice(&data.hist_obs[entry * od..(entry + 1) * od]);
            hist_terms.push((n, k));
            hist_entries.push(entry);
            n += 1;
        }
        hist_rows.push(start..hist_terms.len());
    }
    let tape = head.forward_batch(&rows, n)?;

    let mut u = vec![0.0; n * d];
    let mut f = vec![0.0; indices.len() * d];
    let mut z = Vec::with_capacity(indices.len() * d);
    let mut logp = Vec::with_capacity(indices.len());
    let mut entropy = Vec::with_capacity(indices.len());
    for (q, &i) in indices.iter().enumerate() {
        for t in hist_rows[q].clone() {
            let (row, k) = hist_terms[t];
            let entry = hist_entries[t];
            let mu = tape.mean_row(row);
            let ls = tape.log_std_row(row);
            let a = &data.hist_actions[entry * d..(entry + 1) * d];
            for j in 0..d {
                let uj = (a[j] - mu[j]) / ls[j].exp().max(MIN_RESIDUAL_SCALE);
                u[row * d + j] = uj;
                f[q * d + j] += coeffs[k] * uj;
            }
        }
        let c = current_row[q];
        let mu = tape.mean_row(c);
        let ls = tape.log_std_row(c);
        let a = data.action_row(i);
        let mut lp = 0.0;
        let mut h = 0.0;
        for j in 0..d {
            let sigma = ls[j].exp();
            let mean = mu[j] + sigma * f[q * d + j];
            let std = sigma * sz;
            let zj = (a[j] - mean) / std;
            lp += -0.5 * zj * zj - (ls[j] + ln_sz) - 0.5 * LN_2PI;
            h += ls[j] + ln_sz + 0.5 * (LN_2PI + 1.0);
            z.push(zj);
        }
        logp.push(lp);
        entropy.push(h);
    }
    Ok(LogProbEval {
        logp,
        entropy,
        kind: Kind::Autoregressive {
            coeffs,
            noise_std: sz,
        },
        dim: d,
        tape,
        current_row,
        hist_rows,
        hist_terms,
        z,
        f,
        u,
    })
}

pub(super) fn backward(
    head: &PolicyHead,
    eval: &LogProbEval,
    dlogp: &[f64],
    entropy_weight: f64,
    grad: &mut [f64],
) -> Result<(), PolicyError> {
    let d = eval.dim;
    let rows = eval.tape.rows();
    let mut d_mean = vec![0.0; rows * d];
    let mut d_ls = vec![0.0; rows * d];
    for (q, &g) in dlogp.iter().enumerate() {
        let c = eval.current_row[q];
        let ls = eval.tape.log_std_row(c);
        match &eval.kind {
            Kind::Gaussian => {
                for j in 0..d {
                    let zj = eval.z[q * d + j];
                    d_mean[c * d + j] += g * zj / ls[j].exp();
                    d_ls[c * d + j] += g * (zj * zj - 1.0) + entropy_weight;
                }
            }
            Kind::Autoregressive { coeffs, noise_std } => {
                for j in 0..d {
                    let sigma = ls[j].exp();
                    let std = sigma * noise_std;
                    let zj = eval.z[q * d + j];
                    let fj = eval.f[q * d + j];
                    // logp w.r.t. distribution mean and std
                    let dm = g * zj / std;
                    let ds = g * (zj * zj - 1.0) / std;
                    d_mean[c * d + j] += dm;
                    d_ls[c * d + j] += (dm * fj + ds * noise_std) * sigma + entropy_weight;
                    let df = dm * sigma;
                    for t in eval.hist_rows[q].clone() {
                        let (row, k) = eval.hist_terms[t];
                        let du = df * coeffs[k];
                        let s_raw = eval.tape.log_std_row(row)[j].exp();
                        let s = s_raw.max(MIN_RESIDUAL_SCALE);
                        d_mean[row * d + j] -= du / s;
                        if s_raw >= MIN_RESIDUAL_SCALE {
                            d_ls[row * d + j] -= du * eval.u[row * d + j];
                        }
                    }
                }
            }
        }
    }
    head.backward_batch(&eval.tape, &d_mean, &d_ls, grad)?;
    Ok(())
}
