use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::NnError;

/// Fully connected network: tanh on hidden layers, identity on the output.
///
/// Parameters live in one flat vector. Layer `l` stores its weight matrix
/// row-major as `[n_out][n_in]`, followed by its `n_out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Activations recorded by a forward pass, one row per input.
#[derive(Debug, Clone, Default)]
pub struct Tape {
    rows: usize,
    // acts[0] is the input, acts[l] the output of layer l.
    acts: Vec<Vec<f64>>,
}

impl Tape {
    pub fn is_empty(&self) -> bool {
        self.acts.is_empty()
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Network output, `rows x n_out` row-major.
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn output_row(&self, row: usize, width: usize) -> &[f64] {
        &self.output()[row * width..(row + 1) * width]
    }
}

/// Result of [`Mlp::backward`] for a single input.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub params: Vec<f64>,
    pub input: Vec<f64>,
}

pub fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
}

// y[rows x n_out] = x[rows x n_in] * W^T + b
fn affine(x: &[f64], rows: usize, n_in: usize, w: &[f64], b: &[f64], y: &mut [f64]) {
    let n_out = b.len();
    for r in 0..rows {
        y[r * n_out..(r + 1) * n_out].copy_from_slice(b);
    }
    if rows < 4 {
        for r in 0..rows {
            let xr = &x[r * n_in..(r + 1) * n_in];
            for o in 0..n_out {
                let wo = &w[o * n_in..(o + 1) * n_in];
                let mut s = 0.0;
                for i in 0..n_in {
                    s += wo[i] * xr[i];
                }
                y[r * n_out + o] += s;
            }
        }
        return;
    }
    // SAFETY: slices cover rows*n_in, n_out*n_in and rows*n_out elements.
    unsafe {
        matrixmultiply::dgemm(
            rows,
            n_in,
            n_out,
            1.0,
            x.as_ptr(),
            n_in as isize,
            1,
            w.as_ptr(),
            1,
            n_in as isize,
            1.0,
            y.as_mut_ptr(),
            n_out as isize,
            1,
        );
    }
}

/// `tanh` through one `exp`; within 3e-16 of `f64::tanh` and markedly
/// cheaper, which matters since activations dominate small-layer passes.
#[inline]
pub(crate) fn tanh(x: f64) -> f64 {
    if x.abs() > 19.0 {
        return x.signum();
    }
    let e = (2.0 * x).exp();
    (e - 1.0) / (e + 1.0)
}

impl Mlp {
    /// All-zero network.
    pub fn zeros(sizes: &[usize]) -> Result<Self, NnError> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(NnError::BadLayerSizes(sizes.to_vec()));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params: vec![0.0; param_count(sizes)],
        })
    }

    /// Orthogonal initialisation with gain `sqrt(2)` on hidden layers and
    /// `output_gain` on the last one; biases start at zero.
    pub fn orthogonal<R: Rng + ?Sized>(
        sizes: &[usize],
        output_gain: f64,
        rng: &mut R,
    ) -> Result<Self, NnError> {
        let mut net = Self::zeros(sizes)?;
        let layers = net.num_layers();
        for l in 0..layers {
            let (n_in, n_out) = (sizes[l], sizes[l + 1]);
            let gain = if l + 1 == layers {
                output_gain
            } else {
                std::f64::consts::SQRT_2
            };
            let q = orthogonal_matrix(n_out, n_in, rng);
            let (w, _) = net.layer_mut(l);
            for o in 0..n_out {
                for i in 0..n_in {
                    w[o * n_in + i] = gain * q[(o, i)];
                }
            }
        }
        Ok(net)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), NnError> {
        if params.len() != self.params.len() {
            return Err(NnError::ParamLength {
                expected: self.params.len(),
                got: params.len(),
            });
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    fn layer_offset(&self, l: usize) -> usize {
        param_count(&self.sizes[..=l])
    }

    /// Weights and biases of layer `l`.
    pub fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
        let off = self.layer_offset(l);
        let (w, rest) = self.params[off..].split_at(n_in * n_out);
        (w, &rest[..n_out])
    }

    pub fn layer_mut(&mut self, l: usize) -> (&mut [f64], &mut [f64]) {
        let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
        let off = self.layer_offset(l);
        let (w, rest) = self.params[off..].split_at_mut(n_in * n_out);
        (w, &mut rest[..n_out])
    }

    /// Single-input forward pass without recording.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>, NnError> {
        self.check_input(input.len(), 1)?;
        let mut x = input.to_vec();
        for l in 0..self.num_layers() {
            let (w, b) = self.layer(l);
            let mut y = vec![0.0; b.len()];
            affine(&x, 1, self.sizes[l], w, b, &mut y);
            if l + 1 < self.num_layers() {
                y.iter_mut().for_each(|v| *v = tanh(*v));
            }
            x = y;
        }
        Ok(x)
    }

    /// Forward pass over `rows` inputs stacked row-major, recording activations.
    pub fn forward_batch(&self, inputs: &[f64], rows: usize) -> Result<Tape, NnError> {
        self.check_input(inputs.len(), rows)?;
        let layers = self.num_layers();
        let mut acts = Vec::with_capacity(layers + 1);
        acts.push(inputs.to_vec());
        for l in 0..layers {
            let (w, b) = self.layer(l);
            let mut y = vec![0.0; rows * b.len()];
            affine(&acts[l], rows, self.sizes[l], w, b, &mut y);
            if l + 1 < layers {
                y.iter_mut().for_each(|v| *v = tanh(*v));
            }
            acts.push(y);
        }
        Ok(Tape { rows, acts })
    }

    /// Single-input forward pass that records activations for [`Mlp::backward`].
    pub fn forward_recorded(&self, input: &[f64]) -> Result<Tape, NnError> {
        self.forward_batch(input, 1)
    }

    /// Reverse pass for a recorded single input: gradient of
    /// `output . output_grad` with respect to parameters and input.
    pub fn backward(&self, tape: &Tape, output_grad: &[f64]) -> Result<Gradients, NnError> {
        let mut params = vec![0.0; self.num_params()];
        let input = self
            .backward_batch(tape, output_grad, &mut params, true)?
            .unwrap_or_default();
        Ok(Gradients { params, input })
    }

    /// Batched reverse pass. Parameter gradients are *added* into `grad`.
    /// Returns the input gradient when `want_input_grad` is set.
    pub fn backward_batch(
        &self,
        tape: &Tape,
        output_grads: &[f64],
        grad: &mut [f64],
        want_input_grad: bool,
    ) -> Result<Option<Vec<f64>>, NnError> {
        if tape.is_empty() {
            return Err(NnError::NoForwardPass);
        }
        let rows = tape.rows;
        let layers = self.num_layers();
        if tape.acts.len() != layers + 1 || tape.acts[0].len() != rows * self.input_dim() {
            return Err(NnError::TapeMismatch);
        }
        if output_grads.len() != rows * self.output_dim() {
            return Err(NnError::DimensionMismatch {
                expected: rows * self.output_dim(),
                got: output_grads.len(),
            });
        }
        if grad.len() != self.num_params() {
            return Err(NnError::ParamLength {
                expected: self.num_params(),
                got: grad.len(),
            });
        }
        let mut delta = output_grads.to_vec();
        for l in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            if l + 1 < layers {
                for (d, y) in delta.iter_mut().zip(&tape.acts[l + 1]) {
                    *d *= 1.0 - y * y;
                }
            }
            let x = &tape.acts[l];
            let off = self.layer_offset(l);
            let (gw, rest) = grad[off..].split_at_mut(n_in * n_out);
            let gb = &mut rest[..n_out];
            for r in 0..rows {
                for (g, d) in gb.iter_mut().zip(&delta[r * n_out..(r + 1) * n_out]) {
                    *g += d;
                }
            }
            if rows < 4 {
                for r in 0..rows {
                    let xr = &x[r * n_in..(r + 1) * n_in];
                    for o in 0..n_out {
                        let d = delta[r * n_out + o];
                        for (g, xi) in gw[o * n_in..(o + 1) * n_in].iter_mut().zip(xr) {
                            *g += d * xi;
                        }
                    }
                }
            } else {
                // gW[n_out x n_in] += delta^T[n_out x rows] * x[rows x n_in]
                // SAFETY: dimensions match the slice lengths checked above.
                unsafe {
                    matrixmultiply::dgemm(
                        n_out,
                        rows,
                        n_in,
                        1.0,
                        delta.as_ptr(),
                        1,
                        n_out as isize,
                        x.as_ptr(),
                        n_in as isize,
                        1,
                        1.0,
                        gw.as_mut_ptr(),
                        n_in as isize,
                        1,
                    );
                }
            }
            if l == 0 && !want_input_grad {
                return Ok(None);
            }
            let (w, _) = self.layer(l);
            let mut prev = vec![0.0; rows * n_in];
            if rows < 4 {
                for r in 0..rows {
                    for o in 0..n_out {
                        let d = delta[r * n_out + o];
                        for (p, wi) in prev[r * n_in..(r + 1) * n_in]
                            .iter_mut()
                            .zip(&w[o * n_in..(o + 1) * n_in])
                        {
                            *p += d * wi;
                        }
                    }
                }
            } else {
                // prev[rows x n_in] = delta[rows x n_out] * W[n_out x n_in]
                // SAFETY: as above.
                unsafe {
                    matrixmultiply::dgemm(
                        rows,
                        n_out,
                        n_in,
                        1.0,
                        delta.as_ptr(),
                        n_out as isize,
                        1,
                        w.as_ptr(),
                        n_in as isize,
                        1,
                        0.0,
                        prev.as_mut_ptr(),
                        n_in as isize,
                        1,
                    );
                }
            }
            delta = prev;
        }
        Ok(Some(delta))
    }

    fn check_input(&self, len: usize, rows: usize) -> Result<(), NnError> {
        if len != rows * self.input_dim() {
            return Err(NnError::DimensionMismatch {
                expected: rows * self.input_dim(),
                got: len,
            });
        }
        Ok(())
    }
}

/// `rows x cols` matrix with orthonormal rows or columns (whichever is fewer).
fn orthogonal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    let (big, small) = (rows.max(cols), rows.min(cols));
    let g = DMatrix::<f64>::from_fn(big, small, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    // Sign fix makes the distribution uniform over orthogonal matrices.
    let r = qr.r();
    for j in 0..small {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if rows >= cols {
        q
    } else {
        q.transpose()
    }
}

/// Outcome of [`check_gradient`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientCheck {
    pub max_rel_error: f64,
    pub worst_param: usize,
}

pub const FD_STEP: f64 = 1e-5;
pub const REL_ERROR_FLOOR: f64 = 1e-8;

/// Compare reverse-mode parameter gradients with central finite differences.
///
/// `loss` maps the network output to `(value, d value / d output)`.
/// Relative error per parameter is `|g - g_fd| / max(|g|, 1e-8)`.
pub fn check_gradient<F>(net: &Mlp, input: &[f64], loss: F) -> Result<GradientCheck, NnError>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let tape = net.forward_recorded(input)?;
    let (_, dout) = loss(tape.output());
    let analytic = net.backward(&tape, &dout)?.params;
    let mut probe = net.clone();
    let mut worst = GradientCheck {
        max_rel_error: 0.0,
        worst_param: 0,
    };
    for i in 0..net.num_params() {
        let orig = net.params[i];
        probe.params[i] = orig + FD_STEP;
        let plus = loss(&probe.forward(input)?).0;
        probe.params[i] = orig - FD_STEP;
        let minus = loss(&probe.forward(input)?).0;
        probe.params[i] = orig;
        let fd = (plus - minus) / (2.0 * FD_STEP);
        let rel = (analytic[i] - fd).abs() / analytic[i].abs().max(REL_ERROR_FLOOR);
        if rel > worst.max_rel_error {
            worst = GradientCheck {
                max_rel_error: rel,
                worst_param: i,
            };
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tanh_matches_std() {
        let mut worst: f64 = 0.0;
        for i in 0..=80_000 {
            let x = -40.0 + i as f64 * 1e-3;
            worst = worst.max((tanh(x) - x.tanh()).abs());
        }
        assert!(worst < 3e-16, "{worst}");
        assert_eq!(tanh(0.0), 0.0);
    }
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quad_loss(out: &[f64]) -> (f64, Vec<f64>) {
        let v = out.iter().enumerate().map(|(i, o)| (i as f64 + 1.0) * o + 0.5 * o * o).sum();
        let g = out.iter().enumerate().map(|(i, o)| i as f64 + 1.0 + o).collect();
        (v, g)
    }

    #[test]
    fn param_layout() {
        let net = Mlp::zeros(&[6, 64, 64, 2]).unwrap();
        assert_eq!(net.num_params(), 7 * 64 + 65 * 64 + 65 * 2);
        assert!(Mlp::zeros(&[3]).is_err());
        assert!(Mlp::zeros(&[3, 0, 1]).is_err());
    }

    #[test]
    fn zero_net_outputs_zero() {
        let net = Mlp::zeros(&[3, 8, 2]).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 0.5]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn identity_linear_layer_echoes_input() {
        let mut net = Mlp::zeros(&[3, 3]).unwrap();
        let (w, _) = net.layer_mut(0);
        for i in 0..3 {
            w[i * 3 + i] = 1.0;
        }
        let x = [0.25, -1.5, 3.0];
        assert_eq!(net.forward(&x).unwrap(), x.to_vec());
    }

    #[test]
    fn dimension_mismatch() {
        let net = Mlp::zeros(&[3, 2]).unwrap();
        assert!(matches!(
            net.forward(&[1.0]),
            Err(NnError::DimensionMismatch { expected: 3, got: 1 })
        ));
        assert!(net.forward_batch(&[0.0; 7], 2).is_err());
    }

    #[test]
    fn backward_before_forward_fails() {
        let net = Mlp::zeros(&[3, 2]).unwrap();
        assert!(matches!(
            net.backward(&Tape::default(), &[1.0, 1.0]),
            Err(NnError::NoForwardPass)
        ));
    }

    #[test]
    fn zero_output_grad_gives_zero_gradient() {
        let net = Mlp::orthogonal(&[3, 5, 2], 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let tape = net.forward_recorded(&[0.1, 0.2, 0.3]).unwrap();
        let g = net.backward(&tape, &[0.0, 0.0]).unwrap();
        assert!(g.params.iter().all(|&v| v == 0.0));
        assert!(g.input.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_net_weight_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let net = Mlp::orthogonal(&[4, 3], 1.0, &mut rng).unwrap();
        let x = [0.5, -1.0, 2.0, 0.25];
        let og = [1.5, -0.5, 2.0];
        let tape = net.forward_recorded(&x).unwrap();
        let g = net.backward(&tape, &og).unwrap();
        for i in 0..3 {
            for j in 0..4 {
                assert_eq!(g.params[i * 4 + j], x[j] * og[i]);
            }
            assert_eq!(g.params[12 + i], og[i]);
        }
    }

    #[test]
    fn random_net_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let net = Mlp::orthogonal(&[4, 16, 16, 3], 1.0, &mut rng).unwrap();
        let check = check_gradient(&net, &[0.3, -0.7, 1.1, 0.05], quad_loss).unwrap();
        assert!(check.max_rel_error < 1e-4, "{check:?}");
    }

    #[test]
    fn batch_forward_matches_single() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = Mlp::orthogonal(&[3, 32, 32, 2], 0.5, &mut rng).unwrap();
        let inputs: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let tape = net.forward_batch(&inputs, 10).unwrap();
        for r in 0..10 {
            let single = net.forward(&inputs[r * 3..r * 3 + 3]).unwrap();
            for (a, b) in single.iter().zip(tape.output_row(r, 2)) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn batch_backward_sums_single_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = Mlp::orthogonal(&[3, 8, 2], 1.0, &mut rng).unwrap();
        let inputs: Vec<f64> = (0..18).map(|i| (i as f64 * 0.11).cos()).collect();
        let og: Vec<f64> = (0..12).map(|i| i as f64 * 0.1 - 0.5).collect();
        let tape = net.forward_batch(&inputs, 6).unwrap();
        let mut batch = vec![0.0; net.num_params()];
        let din = net.backward_batch(&tape, &og, &mut batch, true).unwrap().unwrap();
        let mut summed = vec![0.0; net.num_params()];
        for r in 0..6 {
            let t = net.forward_recorded(&inputs[r * 3..r * 3 + 3]).unwrap();
            let g = net.backward(&t, &og[r * 2..r * 2 + 2]).unwrap();
            summed.iter_mut().zip(&g.params).for_each(|(s, v)| *s += v);
            for (a, b) in g.input.iter().zip(&din[r * 3..r * 3 + 3]) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        for (a, b) in batch.iter().zip(&summed) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_net_regression() {
        let net = Mlp::orthogonal(&[3, 4, 2], 1.0, &mut ChaCha8Rng::seed_from_u64(1337)).unwrap();
        let out = net.forward(&[0.5, -0.25, 1.0]).unwrap();
        let again = net.forward(&[0.5, -0.25, 1.0]).unwrap();
        assert_eq!(out, again);
        println!("{out:?}");
    }

    #[test]
    fn orthogonal_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = orthogonal_matrix(3, 7, &mut rng);
        let prod = &q * q.transpose();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - e).abs() < 1e-12);
            }
        }
    }
}
