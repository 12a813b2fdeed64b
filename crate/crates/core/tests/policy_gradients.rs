use arpex::ar::ArModel;
use arpex::nn::PolicyHead;
use arpex::policy::{ExtendedState, Policy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, order: usize, len: usize, obs_dim: usize, act_dim: usize) -> ExtendedState {
    let obs = |rng: &mut ChaCha8Rng| (0..obs_dim).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<f64>>();
    let mut st = ExtendedState::new(order, act_dim, obs(rng));
    for _ in 0..len {
        let a: Vec<f64> = (0..act_dim).map(|_| rng.random_range(-1.5..1.5)).collect();
        let next = obs(rng);
        st.push(a, None, next);
    }
    st
}

/// Max relative error between the analytic log-prob gradient and central
/// differences of the log-prob itself.
fn fd_error(policy: &Policy, head: &PolicyHead, st: &ExtendedState, action: &[f64]) -> f64 {
    let (_, grad) = policy.log_prob(st, action, head).unwrap();
    let base = head.params();
    let mut probe = head.clone();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] += h;
        probe.set_params(&p).unwrap();
        let plus = policy.log_prob(st, action, &probe).unwrap().0;
        p[i] -= 2.0 * h;
        probe.set_params(&p).unwrap();
        let minus = policy.log_prob(st, action, &probe).unwrap().0;
        let fd = (plus - minus) / (2.0 * h);
        let rel = (grad[i] - fd).abs() / grad[i].abs().max(1e-8);
        worst = worst.max(rel);
    }
    worst
}

#[test]
fn ar_log_prob_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for (case, sd) in [(0, false), (1, true), (2, false), (3, true)] {
        let mut head = PolicyHead::new(4, 2, &[8, 8], sd, &mut rng).unwrap();
        // move the mean away from zero so every path carries gradient
        let p: Vec<f64> = head.params().iter().map(|v| v + rng.random_range(-0.3..0.3)).collect();
        head.set_params(&p).unwrap();
        let model = ArModel::binomial(3, 0.5 + 0.1 * case as f64).unwrap();
        let policy = Policy::autoregressive(model);
        let st = random_state(&mut rng, 3, 1 + case, 4, 2);
        let action = [0.4, -0.9];
        let err = fd_error(&policy, &head, &st, &action);
        assert!(err < 1e-4, "case {case}: {err}");
    }
}

#[test]
fn gaussian_log_prob_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut head = PolicyHead::new(3, 2, &[6], false, &mut rng).unwrap();
    head.set_log_std(0.3);
    let st = random_state(&mut rng, 0, 2, 3, 2);
    let err = fd_error(&Policy::gaussian(), &head, &st, &[1.1, -0.2]);
    assert!(err < 1e-4, "{err}");
}
