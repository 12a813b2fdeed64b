//! Ten-second free-running trajectories at 100 Hz and the area of their
//! bounding boxes. Scaling white noise up does not buy the coverage of a
//! smooth process.

use arpex::bench::{bounding_box_area, run_trajectories, PolicySpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = 5;
    for (spec, sigma) in [
        (PolicySpec::Gaussian, 1.0),
        (PolicySpec::Gaussian, 10.0),
        (PolicySpec::arp(3, 0.5), 1.0),
        (PolicySpec::arp(3, 0.95), 1.0),
    ] {
        let pts = run_trajectories(100.0, spec, sigma, 10.0, runs, 0)?;
        let areas: Vec<String> = (0..runs).map(|r| format!("{:6.2}", bounding_box_area(&pts, r))).collect();
        println!("{:<12} sigma {sigma:>4}: {}", spec.to_string(), areas.join(" "));
    }
    Ok(())
}
