//! Analytic gradients against central differences: the MLP backward pass,
//! and the autoregressive log-density, whose gradient flows through the
//! mean and scale evaluated at every history state.

use arpex::ar::ArModel;
use arpex::nn::{check_gradient, Mlp, PolicyHead};
use arpex::policy::{ExtendedState, Policy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let net = Mlp::orthogonal(&[4, 8, 8, 3], 1.0, &mut rng)?;
    let input = [0.3, -1.2, 0.7, 2.0];
    let target = [0.5, -0.5, 0.1];
    let check = check_gradient(&net, &input, |out: &[f64]| {
        let loss = out.iter().zip(&target).map(|(o, t)| 0.5 * (o - t).powi(2)).sum();
        (loss, out.iter().zip(&target).map(|(o, t)| o - t).collect())
    })?;
    println!("mlp: max relative error {:.2e}", check.max_rel_error);

    let head = PolicyHead::new(4, 2, &[8], true, &mut rng)?;
    let policy = Policy::autoregressive(ArModel::binomial(3, 0.7)?);
    let mut state = ExtendedState::new(3, 2, vec![0.1, 0.2, 0.3, 0.4]);
    for _ in 0..3 {
        let obs = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        state.push(vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)], None, obs);
    }
    let action = [0.2, -0.4];
    let (logp, grad) = policy.log_prob(&state, &action, &head)?;
    let base = head.params();
    let mut probe = head.clone();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] += h;
        probe.set_params(&p)?;
        let up = policy.log_prob(&state, &action, &probe)?.0;
        p[i] -= 2.0 * h;
        probe.set_params(&p)?;
        let down = policy.log_prob(&state, &action, &probe)?.0;
        let fd = (up - down) / (2.0 * h);
        worst = worst.max((grad[i] - fd).abs() / grad[i].abs().max(1e-8));
    }
    println!("arp log p = {logp:.4}: max relative error over {} params {worst:.2e}", base.len());
    Ok(())
}
