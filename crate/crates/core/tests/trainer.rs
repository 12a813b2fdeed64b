use arpex::ar::ArModel;
use arpex::env::SquareEnv;
use arpex::policy::Policy;
use arpex::trainer::{Agent, Collector, Ppo, TrainConfig, TrainError, Trainer};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config() -> TrainConfig {
    TrainConfig {
        batch_size: 256,
        opt_batch: 64,
        opt_epochs: 2,
        hidden: vec![16, 16],
        ..TrainConfig::default()
    }
}

fn agent(policy: Policy, cfg: &TrainConfig, seed: u64) -> Agent {
    Agent::new(policy, 6, 2, cfg, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn arp(alpha: f64) -> Policy {
    Policy::autoregressive(ArModel::binomial(3, alpha).unwrap())
}

#[test]
fn white_noise_pipeline_equals_gaussian_pipeline() {
    let cfg = small_config();
    let mut g = Trainer::square(Policy::gaussian(), 10.0, cfg.clone(), 11).unwrap();
    let mut w = Trainer::square(arp(0.0), 10.0, cfg, 11).unwrap();
    for _ in 0..4 {
        let rg = g.iterate().unwrap();
        let rw = w.iterate().unwrap();
        let (sg, sw) = (g.last_stats(), w.last_stats());
        assert!((sg.policy_loss - sw.policy_loss).abs() < 1e-10);
        assert!((sg.value_loss - sw.value_loss).abs() < 1e-10);
        assert_eq!(rg.mean_return.to_bits(), rw.mean_return.to_bits());
        assert!(sw.logp_drift < 1e-12);
    }
    let (pg, pw) = (g.agent.params(), w.agent.params());
    let worst = pg.iter().zip(&pw).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn zero_epochs_leave_parameters_unchanged() {
    let cfg = TrainConfig {
        opt_epochs: 0,
        ..small_config()
    };
    let mut a = agent(arp(0.7), &cfg, 2);
    let before = a.params();
    let mut c = Collector::new(SquareEnv::with_rate(10.0).unwrap(), 3, 2);
    let batch = c.collect(&a, 128).unwrap();
    let mut ppo = Ppo::new(cfg, &a).unwrap();
    let stats = ppo.update(&mut a, &batch, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(a.params(), before);
    assert_eq!(stats.minibatches, 0);
}

#[test]
fn collection_is_deterministic() {
    let cfg = small_config();
    let a = agent(arp(0.8), &cfg, 4);
    let mut c1 = Collector::new(SquareEnv::with_rate(25.0).unwrap(), 3, 9);
    let mut c2 = Collector::new(SquareEnv::with_rate(25.0).unwrap(), 3, 9);
    for _ in 0..2 {
        assert_eq!(c1.collect(&a, 300).unwrap(), c2.collect(&a, 300).unwrap());
    }
}

#[test]
fn rewards_are_minus_dt_and_histories_respect_order() {
    let cfg = small_config();
    let a = agent(arp(0.5), &cfg, 1);
    let mut c = Collector::new(SquareEnv::with_rate(10.0).unwrap(), 3, 1);
    let b = c.collect(&a, 500).unwrap();
    assert_eq!(b.len(), 500);
    assert!(b.rewards.iter().all(|&r| (r + 0.1).abs() < 1e-15));
    for i in 0..b.len() {
        assert!(b.view().history_range(i).len() <= 3);
    }
    // a reset empties the history
    for i in 1..b.len() {
        if b.dones[i - 1] {
            assert_eq!(b.view().history_range(i).len(), 0);
        }
    }
}

#[test]
fn resuming_collection_freezes_cached_residuals() {
    let cfg = small_config();
    let a = agent(arp(0.9), &cfg, 3);
    let mut c = Collector::new(SquareEnv::with_rate(10.0).unwrap(), 3, 3);
    c.collect(&a, 2).unwrap();
    assert_eq!(c.env().state().frozen_count(), 0);
    c.collect(&a, 1).unwrap();
    assert_eq!(c.env().state().history_len(), 3);
    assert_eq!(c.env().state().frozen_count(), 2);
}

#[test]
fn surrogate_gradient_matches_finite_differences() {
    let cfg = TrainConfig {
        hidden: vec![5],
        state_dependent_std: true,
        ..small_config()
    };
    for (case, policy) in [arp(0.6), Policy::gaussian()].into_iter().enumerate() {
        let mut a = agent(policy, &cfg, 20 + case as u64);
        let mut c = Collector::new(SquareEnv::with_rate(10.0).unwrap(), a.policy.order(), 5);
        let batch = c.collect(&a, 40).unwrap();
        let ppo = Ppo::new(cfg.clone(), &a).unwrap();
        let (adv, targets) = ppo.advantages(&batch);
        let idx: Vec<usize> = (0..batch.len()).collect();
        let mut grad = vec![0.0; a.num_params()];
        ppo.loss_and_grad(&a, &batch, &adv, &targets, &idx, &mut grad).unwrap();
        let base = a.params();
        let mut scratch = vec![0.0; a.num_params()];
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..base.len() {
            let mut p = base.clone();
            p[i] = base[i] + h;
            a.set_params(&p).unwrap();
            let plus = ppo.loss_and_grad(&a, &batch, &adv, &targets, &idx, &mut scratch).unwrap().total;
            p[i] = base[i] - h;
            a.set_params(&p).unwrap();
            let minus = ppo.loss_and_grad(&a, &batch, &adv, &targets, &idx, &mut scratch).unwrap().total;
            let fd = (plus - minus) / (2.0 * h);
            worst = worst.max((grad[i] - fd).abs() / grad[i].abs().max(1e-6));
        }
        a.set_params(&base).unwrap();
        assert!(worst < 1e-3, "case {case}: {worst}");
    }
}

#[test]
fn non_finite_parameters_abort_the_update() {
    let cfg = small_config();
    let mut a = agent(Policy::gaussian(), &cfg, 6);
    let mut c = Collector::new(SquareEnv::with_rate(10.0).unwrap(), 0, 6);
    let batch = c.collect(&a, 128).unwrap();
    let mut p = a.params();
    let last = p.len() - 1;
    p[last] = f64::NAN; // value output bias
    a.set_params(&p).unwrap();
    let mut ppo = Ppo::new(cfg, &a).unwrap();
    let err = ppo.update(&mut a, &batch, &mut ChaCha8Rng::seed_from_u64(0));
    assert!(matches!(err, Err(TrainError::NonFinite { epoch: 0, minibatch: 0, .. })));
}

#[test]
fn progress_time_is_steps_times_dt() {
    let mut t = Trainer::square(Policy::gaussian(), 25.0, small_config(), 0).unwrap();
    let rows = t.run(25.0, |_| {}).unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2].sim_seconds, 768.0 * 0.04);
}
