use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{BenchError, PolicySpec};
use crate::env::{HistoryWrapper, SquareConfig, SquareEnv};
use crate::policy::FixedHead;

/// Agent position at time `t` of run `run`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub run: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

/// `n` free-running rollouts of `duration` seconds under the fixed random
/// policy with scale `sigma_scale`. Reaching the target does not stop a
/// run. Run `i` draws from stream `i` of `seed`; each run starts with its
/// `t = 0` point.
pub fn run_trajectories(
    action_rate: f64,
    spec: PolicySpec,
    sigma_scale: f64,
    duration: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<TrajectoryPoint>, BenchError> {
    let policy = spec.build()?;
    let head = FixedHead::standard(2, sigma_scale);
    let mut points = Vec::new();
    for run in 0..n {
        let env = SquareEnv::new(SquareConfig {
            time_limit: None,
            terminate_on_goal: false,
            ..SquareConfig::new(action_rate)
        })?;
        let steps = (duration / env.dt()).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let mut env = HistoryWrapper::new(env, policy.order());
        env.reset(&mut rng);
        let mut push = |env: &HistoryWrapper<SquareEnv>| {
            let [x, y] = env.inner().pos();
            points.push(TrajectoryPoint {
                run,
                t: env.inner().elapsed(),
                x,
                y,
            });
        };
        push(&env);
        let mut noise = [0.0; 2];
        for _ in 0..steps {
            for e in noise.iter_mut() {
                *e = StandardNormal.sample(&mut rng);
            }
            let s = policy.sample(env.state(), &head, &noise)?;
            env.step(&s.action, Some(s.residual))?;
            push(&env);
        }
    }
    Ok(points)
}

/// Area of the axis-aligned box around the points of run `run`.
pub fn bounding_box_area(points: &[TrajectoryPoint], run: usize) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points.iter().filter(|p| p.run == run) {
        lo = [lo[0].min(p.x), lo[1].min(p.y)];
        hi = [hi[0].max(p.x), hi[1].max(p.y)];
    }
    if lo[0] > hi[0] {
        return 0.0;
    }
    (hi[0] - lo[0]) * (hi[1] - lo[1])
}
