use arpex::ar::{
    acf, binomial_rho1, characteristic_roots, coeffs_from_roots, is_stationary, solve_stationary, ArModel,
};
use arpex::nn::{Checkpoint, PolicyHead};
use arpex::policy::{ExtendedState, FixedHead, Policy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn roots(max_p: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..0.95, 1..=max_p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn companion_eigenvalues_recover_roots(mut rs in roots(5)) {
        let coeffs = coeffs_from_roots(&rs).unwrap();
        prop_assert!(is_stationary(&coeffs));
        let mut got: Vec<f64> = characteristic_roots(&coeffs).iter().map(|z| z.re).collect();
        rs.sort_by(f64::total_cmp);
        got.sort_by(f64::total_cmp);
        // Repeated roots split by O(eps^(1/m)) under eigen-decomposition.
        let tol = if rs.windows(2).any(|w| (w[1] - w[0]).abs() < 1e-2) { 1e-3 } else { 1e-7 };
        for (a, b) in rs.iter().zip(&got) {
            prop_assert!((a - b).abs() < tol, "{rs:?} vs {got:?}");
        }
    }

    #[test]
    fn stationary_solution_has_unit_variance(rs in roots(5)) {
        let coeffs = coeffs_from_roots(&rs).unwrap();
        let sol = solve_stationary(&coeffs).unwrap();
        prop_assert!(sol.noise_var > 0.0 && sol.noise_var <= 1.0 + 1e-12);
        // gamma_0 = sum_k phi_k gamma_k + sigma_Z^2 with gamma_0 = 1.
        let model = ArModel::from_roots(&rs).unwrap();
        let g = model.autocov();
        let implied: f64 = coeffs.iter().zip(&g[1..]).map(|(p, r)| p * r).sum::<f64>() + sol.noise_var;
        prop_assert!((implied - 1.0).abs() < 1e-9);
    }

    #[test]
    fn autocorrelation_is_bounded(rs in roots(4)) {
        let model = ArModel::from_roots(&rs).unwrap();
        let t = acf(&model, 50);
        prop_assert!((t.rho[0] - 1.0).abs() < 1e-12);
        prop_assert!(t.rho.iter().all(|r| r.abs() <= 1.0 + 1e-9));
    }

    #[test]
    fn rho1_increases_with_alpha(p in 1usize..=5, a in 0.0f64..0.9, d in 0.001f64..0.05) {
        let lo = binomial_rho1(p, a).unwrap();
        let hi = binomial_rho1(p, a + d).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn rho1_increases_with_order(p in 1usize..5, a in 0.05f64..0.95) {
        prop_assert!(binomial_rho1(p + 1, a).unwrap() > binomial_rho1(p, a).unwrap());
    }

    #[test]
    fn head_params_round_trip(seed in any::<u64>(), sd in any::<bool>(), h in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let head = PolicyHead::new(5, 3, &[h, h], sd, &mut rng).unwrap();
        let mut other = PolicyHead::new(5, 3, &[h, h], sd, &mut ChaCha8Rng::seed_from_u64(!seed)).unwrap();
        other.set_params(&head.params()).unwrap();
        prop_assert_eq!(&other, &head);

        let ckpt = Checkpoint { head, value: None, step: seed % 1000 };
        let mut buf = Vec::new();
        ckpt.write_to(&mut buf).unwrap();
        prop_assert_eq!(Checkpoint::read_from(buf.as_slice()).unwrap(), ckpt);
    }

    #[test]
    fn fixed_head_actions_have_unit_variance_scale(p in 1usize..=5, a in 0.0f64..0.95, z0 in -3.0f64..3.0, z1 in -3.0f64..3.0) {
        // First action from an empty history is just sigma_Z * noise.
        let model = ArModel::binomial(p, a).unwrap();
        let sz = model.noise_std();
        let policy = Policy::autoregressive(model);
        let state = ExtendedState::new(p, 2, vec![0.0; 6]);
        let s = policy.sample(&state, &FixedHead::standard(2, 1.0), &[z0, z1]).unwrap();
        prop_assert!((s.action[0] - sz * z0).abs() < 1e-12);
        prop_assert!((s.action[1] - sz * z1).abs() < 1e-12);
    }
}
