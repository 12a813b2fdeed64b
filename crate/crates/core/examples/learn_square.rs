//! Train an autoregressive policy on Square and print the progress log.
//!
//! ```text
//! cargo run --release --example learn_square [arp:3:0.8|gaussian] [rate] [sim_seconds]
//! ```

use arpex::bench::PolicySpec;
use arpex::trainer::{TrainConfig, Trainer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let spec: PolicySpec = args.next().unwrap_or_else(|| "arp:3:0.8".into()).parse()?;
    let rate: f64 = args.next().map_or(Ok(10.0), |s| s.parse())?;
    let seconds: f64 = args.next().map_or(Ok(10_000.0), |s| s.parse())?;

    let config = TrainConfig::default().for_rate(rate);
    let mut trainer = Trainer::square(spec.build()?, rate, config, 0)?;
    println!("{:>10} {:>11} {:>11} {:>10} {:>8} {:>8}", "sim_s", "mean_ret", "ep_len", "kl", "clipfrac", "ex_var");
    trainer.run(seconds, |r| {
        println!(
            "{:>10.1} {:>11.2} {:>11.1} {:>10.3e} {:>8.3} {:>8.3}",
            r.sim_seconds, r.mean_return, r.mean_ep_len, r.kl, r.clipfrac, r.explained_var
        );
    })?;
    Ok(())
}
