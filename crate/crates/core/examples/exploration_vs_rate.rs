//! Random-agent time to target on Square as the action rate grows. White
//! Gaussian exploration slows down sharply at high rates, while smooth
//! autoregressive exploration keeps covering ground.
//!
//! ```text
//! cargo run --release --example exploration_vs_rate [budget_seconds]
//! ```

use arpex::bench::{run_exploration, PolicySpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let budget: f64 = std::env::args().nth(1).map_or(Ok(2e4), |s| s.parse())?;
    let specs = [
        PolicySpec::Gaussian,
        PolicySpec::arp(3, 0.5),
        PolicySpec::arp(3, 0.8),
        PolicySpec::arp(3, 0.95),
    ];
    let reports = run_exploration(&[5.0, 10.0, 25.0, 50.0, 100.0], &specs, 1.0, budget, &[0])?;
    println!("mean time to target (s), {budget} simulated seconds per cell");
    print!("{:>6}", "Hz");
    for s in &specs {
        print!(" {:>12}", s.to_string());
    }
    println!();
    for row in reports.chunks(specs.len()) {
        print!("{:>6}", row[0].action_rate);
        for r in row {
            let mark = if r.censored { ">" } else { " " };
            print!(" {mark}{:>11.1}", r.mean_time);
        }
        println!();
    }
    Ok(())
}
