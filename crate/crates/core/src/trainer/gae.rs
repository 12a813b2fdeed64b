/// Inputs of the advantage recursion. Step `t` ends an episode when
/// `dones[t]`; a timeout is a done whose final state is not terminal and
/// whose value `bootstrap[t]` is used in place of the missing successor.
#[derive(Debug, Clone, Copy)]
pub struct GaeInput<'a> {
    pub rewards: &'a [f64],
    pub values: &'a [f64],
    pub dones: &'a [bool],
    pub timeouts: &'a [bool],
    pub bootstrap: &'a [f64],
    /// Value of the state following the last step when it did not end an
    /// episode.
    pub last_value: f64,
}

/// GAE(gamma, lambda). Returns `(advantages, value targets)` where the
/// targets are `advantages + values`.
pub fn gae(input: &GaeInput<'_>, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let n = input.rewards.len();
    let mut adv = vec![0.0; n];
    let mut running = 0.0;
    for t in (0..n).rev() {
        let (next_value, carry) = if input.dones[t] {
            let v = if input.timeouts[t] { input.bootstrap[t] } else { 0.0 };
            (v, 0.0)
        } else if t + 1 == n {
            (input.last_value, 0.0)
        } else {
            (input.values[t + 1], 1.0)
        };
        let delta = input.rewards[t] + gamma * next_value - input.values[t];
        running = delta + gamma * lambda * carry * running;
        adv[t] = running;
    }
    let targets = adv.iter().zip(input.values).map(|(a, v)| a + v).collect();
    (adv, targets)
}

/// Shift to zero mean and scale to unit variance.
pub fn normalize(x: &[f64]) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let scale = var.sqrt() + 1e-8;
    x.iter().map(|v| (v - mean) / scale).collect()
}
