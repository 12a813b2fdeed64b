use rand::Rng;

use super::{Mlp, NnError, Tape};

pub const LOG_STD_MIN: f64 = -8.0;
pub const LOG_STD_MAX: f64 = 2.0;

/// Output gain of the final mean layer, keeping the initial mean near zero.
pub const MEAN_OUTPUT_GAIN: f64 = 0.01;

/// How the policy's log standard deviation is parametrised.
#[derive(Debug, Clone, PartialEq)]
pub enum LogStd {
    /// One free parameter per action dimension.
    Independent(Vec<f64>),
    /// A separate network mapping the observation to the log std.
    StateDependent(Mlp),
}

/// Mean and scale approximators of a diagonal Gaussian policy.
///
/// The flat parameter vector is the mean network's parameters followed by
/// the log-std parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyHead {
    mean: Mlp,
    log_std: LogStd,
}

/// Evaluated head for a single observation.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadOutput {
    pub mean: Vec<f64>,
    /// Clamped log std.
    pub log_std: Vec<f64>,
    pub std: Vec<f64>,
}

/// Batched head evaluation, kept for the reverse pass.
#[derive(Debug, Clone)]
pub struct HeadTape {
    mean: Tape,
    log_std: Option<Tape>,
    raw_log_std: Vec<f64>,
    clamped_log_std: Vec<f64>,
    dim: usize,
}

impl HeadTape {
    pub fn rows(&self) -> usize {
        self.mean.rows()
    }

    pub fn mean_row(&self, r: usize) -> &[f64] {
        self.mean.output_row(r, self.dim)
    }

    pub fn log_std_row(&self, r: usize) -> &[f64] {
        &self.clamped_log_std[r * self.dim..(r + 1) * self.dim]
    }
}

fn clamp_log_std(v: f64) -> f64 {
    v.clamp(LOG_STD_MIN, LOG_STD_MAX)
}

impl PolicyHead {
    pub fn new<R: Rng + ?Sized>(
        obs_dim: usize,
        act_dim: usize,
        hidden: &[usize],
        state_dependent_std: bool,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        let mut sizes = vec![obs_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(act_dim);
        let mean = Mlp::orthogonal(&sizes, MEAN_OUTPUT_GAIN, rng)?;
        let log_std = if state_dependent_std {
            LogStd::StateDependent(Mlp::orthogonal(&sizes, MEAN_OUTPUT_GAIN, rng)?)
        } else {
            LogStd::Independent(vec![0.0; act_dim])
        };
        Ok(Self { mean, log_std })
    }

    pub fn from_parts(mean: Mlp, log_std: LogStd) -> Result<Self, NnError> {
        let ok = match &log_std {
            LogStd::Independent(v) => v.len() == mean.output_dim(),
            LogStd::StateDependent(net) => {
                net.input_dim() == mean.input_dim() && net.output_dim() == mean.output_dim()
            }
        };
        if !ok {
            return Err(NnError::HeadMismatch);
        }
        Ok(Self { mean, log_std })
    }

    pub fn obs_dim(&self) -> usize {
        self.mean.input_dim()
    }

    pub fn act_dim(&self) -> usize {
        self.mean.output_dim()
    }

    pub fn mean_net(&self) -> &Mlp {
        &self.mean
    }

    pub fn mean_net_mut(&mut self) -> &mut Mlp {
        &mut self.mean
    }

    pub fn log_std(&self) -> &LogStd {
        &self.log_std
    }

    /// Overwrite a state-independent log std; no-op for the network variant.
    pub fn set_log_std(&mut self, value: f64) {
        if let LogStd::Independent(v) = &mut self.log_std {
            v.iter_mut().for_each(|x| *x = value);
        }
    }

    pub fn num_params(&self) -> usize {
        self.mean.num_params() + self.log_std_params().len()
    }

    fn log_std_params(&self) -> &[f64] {
        match &self.log_std {
            LogStd::Independent(v) => v,
            LogStd::StateDependent(net) => net.params(),
        }
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = self.mean.params().to_vec();
        out.extend_from_slice(self.log_std_params());
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), NnError> {
        if params.len() != self.num_params() {
            return Err(NnError::ParamLength {
                expected: self.num_params(),
                got: params.len(),
            });
        }
        let (m, s) = params.split_at(self.mean.num_params());
        self.mean.set_params(m)?;
        match &mut self.log_std {
            LogStd::Independent(v) => v.copy_from_slice(s),
            LogStd::StateDependent(net) => net.set_params(s)?,
        }
        Ok(())
    }

    pub fn eval(&self, obs: &[f64]) -> Result<HeadOutput, NnError> {
        let mean = self.mean.forward(obs)?;
        let log_std: Vec<f64> = match &self.log_std {
            LogStd::Independent(v) => v.iter().map(|&x| clamp_log_std(x)).collect(),
            LogStd::StateDependent(net) => {
                net.forward(obs)?.into_iter().map(clamp_log_std).collect()
            }
        };
        let std = log_std.iter().map(|l| l.exp()).collect();
        Ok(HeadOutput { mean, log_std, std })
    }

    pub fn forward_batch(&self, obs: &[f64], rows: usize) -> Result<HeadTape, NnError> {
        let dim = self.act_dim();
        let mean = self.mean.forward_batch(obs, rows)?;
        let (log_std, raw_log_std) = match &self.log_std {
            LogStd::Independent(v) => {
                let raw: Vec<f64> = (0..rows).flat_map(|_| v.iter().copied()).collect();
                (None, raw)
            }
            LogStd::StateDependent(net) => {
                let t = net.forward_batch(obs, rows)?;
                let raw = t.output().to_vec();
                (Some(t), raw)
            }
        };
        let clamped_log_std = raw_log_std.iter().map(|&x| clamp_log_std(x)).collect();
        Ok(HeadTape {
            mean,
            log_std,
            raw_log_std,
            clamped_log_std,
            dim,
        })
    }

    /// Add the parameter gradient for upstream gradients on the mean and the
    /// (clamped) log std of every row.
    pub fn backward_batch(
        &self,
        tape: &HeadTape,
        d_mean: &[f64],
        d_log_std: &[f64],
        grad: &mut [f64],
    ) -> Result<(), NnError> {
        if grad.len() != self.num_params() {
            return Err(NnError::ParamLength {
                expected: self.num_params(),
                got: grad.len(),
            });
        }
        let (gm, gs) = grad.split_at_mut(self.mean.num_params());
        self.mean.backward_batch(&tape.mean, d_mean, gm, false)?;
        let masked: Vec<f64> = d_log_std
            .iter()
            .zip(&tape.raw_log_std)
            .map(|(&d, &raw)| {
                if (LOG_STD_MIN..=LOG_STD_MAX).contains(&raw) {
                    d
                } else {
                    0.0
                }
            })
            .collect();
        match &self.log_std {
            LogStd::Independent(_) => {
                let dim = tape.dim;
                for (i, d) in masked.iter().enumerate() {
                    gs[i % dim] += d;
                }
            }
            LogStd::StateDependent(net) => {
                let t = tape.log_std.as_ref().ok_or(NnError::TapeMismatch)?;
                net.backward_batch(t, &masked, gs, false)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn initial_head_is_near_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let head = PolicyHead::new(6, 2, &[64, 64], false, &mut rng).unwrap();
        let out = head.eval(&[0.1, -0.2, 0.0, 0.3, 1.0, -1.0]).unwrap();
        assert!(out.mean.iter().all(|m| m.abs() < 0.05));
        assert_eq!(out.std, vec![1.0, 1.0]);
    }

    #[test]
    fn param_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for sd in [false, true] {
            let mut head = PolicyHead::new(3, 2, &[8], sd, &mut rng).unwrap();
            let p = head.params();
            let before = head.clone();
            head.set_params(&p).unwrap();
            assert_eq!(head, before);
            assert!(head.set_params(&p[1..]).is_err());
        }
    }

    #[test]
    fn log_std_is_clamped() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut head = PolicyHead::new(3, 2, &[8], false, &mut rng).unwrap();
        head.set_log_std(-20.0);
        let out = head.eval(&[0.0; 3]).unwrap();
        assert_eq!(out.log_std, vec![LOG_STD_MIN; 2]);
        head.set_log_std(5.0);
        assert_eq!(head.eval(&[0.0; 3]).unwrap().log_std, vec![LOG_STD_MAX; 2]);
    }

    #[test]
    fn clamped_log_std_has_no_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut head = PolicyHead::new(3, 2, &[4], false, &mut rng).unwrap();
        head.set_log_std(-9.0);
        let tape = head.forward_batch(&[0.0; 3], 1).unwrap();
        let mut g = vec![0.0; head.num_params()];
        head.backward_batch(&tape, &[0.0, 0.0], &[1.0, 1.0], &mut g).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mismatched_parts_rejected() {
        let mean = Mlp::zeros(&[3, 2]).unwrap();
        assert!(PolicyHead::from_parts(mean.clone(), LogStd::Independent(vec![0.0; 3])).is_err());
        assert!(PolicyHead::from_parts(mean, LogStd::Independent(vec![0.0; 2])).is_ok());
    }
}
