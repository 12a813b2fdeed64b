//! One Square episode under an untrained autoregressive policy, showing the
//! history-extended state, the history term and the log-density of each
//! action.

use arpex::ar::ArModel;
use arpex::env::{HistoryWrapper, SquareEnv};
use arpex::nn::PolicyHead;
use arpex::policy::ArPolicy;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let head = PolicyHead::new(6, 2, &[64, 64], false, &mut rng)?;
    let policy = ArPolicy::new(ArModel::binomial(3, 0.8)?);
    let mut env = HistoryWrapper::new(SquareEnv::with_rate(10.0)?, policy.order());
    env.reset(&mut rng);
    println!("target {:?}", env.inner().target());
    println!("{:>4} {:>4} {:>17} {:>17} {:>9}", "t", "hist", "f", "action", "log p");
    for t in 0..12 {
        let noise: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut rng)).collect();
        let state = env.state();
        let f = policy.history_term(state, &head, true)?;
        let s = policy.sample(state, &head, &noise)?;
        println!(
            "{t:>4} {:>4} [{:>7.3},{:>7.3}] [{:>7.3},{:>7.3}] {:>9.3}",
            state.history_len(),
            f[0],
            f[1],
            s.action[0],
            s.action[1],
            s.log_prob
        );
        env.step(&s.action, Some(s.residual))?;
    }
    let [x, y] = env.inner().pos();
    println!("position after {:.1} s: ({x:.3}, {y:.3})", env.inner().elapsed());
    Ok(())
}
