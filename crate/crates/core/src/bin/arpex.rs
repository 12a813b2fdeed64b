//! Command-line front end for the desk-scale experiments. Each subcommand
//! writes one CSV file (stdout when `--out` is omitted).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use arpex::ar::{acf, alpha_for_rho1, sample_path, ArModel};
use arpex::bench::{self, BenchError, CsvOut, ExperimentConfig, PolicySpec};

#[derive(Parser)]
#[command(name = "arpex", version, about = "Autoregressive exploration processes and Square benchmarks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Base random seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output CSV path
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file overriding built-in defaults; flags override the file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Realisation of a binomial AR-p process (`t,x`)
    Noise {
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Analytic autocorrelation of a binomial AR-p process (`lag,rho`)
    Acf {
        #[arg(long)]
        p: Option<usize>,
        /// Lag-one autocorrelation to match; the root is solved for
        #[arg(long, conflicts_with = "alpha")]
        rho1: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        max_lag: Option<usize>,
    },
    /// Random-agent time to target across action rates
    Explore {
        /// Comma-separated action rates in Hz
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        /// Comma-separated policies: `gaussian` or `arp:<p>:<alpha>`
        #[arg(long, value_delimiter = ',')]
        policies: Option<Vec<PolicySpec>>,
        /// Simulated seconds per rate, policy and seed
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long)]
        sigma_scale: Option<f64>,
        /// Comma-separated seeds (default: `--seed`)
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Free-running random-agent trajectories (`run,t,x,y`)
    Trajectories {
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        policy: Option<PolicySpec>,
        #[arg(long)]
        sigma_scale: Option<f64>,
        /// Seconds per run
        #[arg(long)]
        duration: Option<f64>,
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Train on Square and write the seed-averaged learning curve
    Learn {
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        policy: Option<PolicySpec>,
        #[arg(long)]
        sim_seconds: Option<f64>,
        /// Number of seeds, counting up from `--seed`
        #[arg(long)]
        seeds: Option<usize>,
        /// Write every seed's curve with a leading `seed` column
        #[arg(long)]
        per_seed: bool,
        /// Directory receiving `seed-<n>.ckpt` with each seed's final networks
        #[arg(long)]
        checkpoint_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), BenchError> {
    let cfg = match &cli.common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let seed = cli.common.seed.or(cfg.seed).unwrap_or(0);
    let out = || CsvOut::open(cli.common.out.as_deref());
    match cli.command {
        Command::Noise { p, alpha, steps } => {
            let p = p.or(cfg.noise.p).unwrap_or(3);
            let alpha = alpha.or(cfg.noise.alpha).unwrap_or(0.8);
            let steps = steps.or(cfg.noise.steps).unwrap_or(1000);
            let model = ArModel::binomial(p, alpha)?;
            let xs = sample_path(&model, steps, &mut ChaCha8Rng::seed_from_u64(seed));
            bench::write_noise(out()?, &xs)
        }
        Command::Acf { p, rho1, alpha, max_lag } => {
            let p = p.or(cfg.acf.p).unwrap_or(3);
            let max_lag = max_lag.or(cfg.acf.max_lag).unwrap_or(600);
            let alpha = match (alpha, rho1) {
                (Some(a), _) => a,
                (None, Some(r)) => alpha_for_rho1(p, r)?,
                (None, None) => match (cfg.acf.alpha, cfg.acf.rho1) {
                    (Some(a), _) => a,
                    (None, r) => alpha_for_rho1(p, r.unwrap_or(0.99))?,
                },
            };
            bench::write_acf(out()?, &acf(&ArModel::binomial(p, alpha)?, max_lag))
        }
        Command::Explore { rates, policies, budget, sigma_scale, seeds } => {
            let rates = rates.or(cfg.explore.rates).unwrap_or(bench::DEFAULT_RATES.to_vec());
            let policies = policies
                .or(cfg.explore.policies)
                .unwrap_or_else(|| vec![PolicySpec::Gaussian, PolicySpec::arp(3, 0.5), PolicySpec::arp(3, 0.8), PolicySpec::arp(3, 0.95)]);
            let budget = budget.or(cfg.explore.budget).unwrap_or(bench::DEFAULT_EXPLORE_BUDGET);
            let sigma = sigma_scale.or(cfg.explore.sigma_scale).unwrap_or(1.0);
            let seeds = seeds.or(cfg.explore.seeds).unwrap_or(vec![seed]);
            let reports = bench::run_exploration(&rates, &policies, sigma, budget, &seeds)?;
            bench::write_exploration(out()?, &reports)
        }
        Command::Trajectories { rate, policy, sigma_scale, duration, runs } => {
            let t = &cfg.trajectories;
            let points = bench::run_trajectories(
                rate.or(t.rate).unwrap_or(100.0),
                policy.or(t.policy).unwrap_or(PolicySpec::arp(3, 0.95)),
                sigma_scale.or(t.sigma_scale).unwrap_or(1.0),
                duration.or(t.duration).unwrap_or(10.0),
                runs.or(t.runs).unwrap_or(5),
                seed,
            )?;
            bench::write_trajectories(out()?, &points)
        }
        Command::Learn { rate, policy, sim_seconds, seeds, per_seed, checkpoint_dir } => {
            let l = &cfg.learn;
            let n = seeds.or(l.seeds).unwrap_or(bench::DEFAULT_LEARN_SEEDS);
            let seeds: Vec<u64> = (0..n as u64).map(|i| seed + i).collect();
            let result = bench::run_learning(
                rate.or(l.rate).unwrap_or(10.0),
                policy.or(l.policy).unwrap_or(PolicySpec::arp(3, 0.8)),
                sim_seconds.or(l.sim_seconds).unwrap_or(bench::DEFAULT_LEARN_SECONDS),
                &seeds,
                &cfg.train,
            )?;
            if let Some(dir) = checkpoint_dir {
                std::fs::create_dir_all(&dir)?;
                for (s, ckpt) in seeds.iter().zip(&result.checkpoints) {
                    ckpt.save(dir.join(format!("seed-{s}.ckpt")))?;
                }
            }
            bench::write_learning(out()?, &result, per_seed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("arpex: {e}");
            ExitCode::FAILURE
        }
    }
}
