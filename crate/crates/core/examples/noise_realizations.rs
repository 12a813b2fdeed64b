//! Sample paths of the binomial AR-3 process for increasing root `alpha`.
//! Every path has a standard normal marginal; larger `alpha` only makes it
//! smoother.
//!
//! ```text
//! cargo run --release --example noise_realizations [out.csv]
//! ```

use arpex::ar::{sample_path, ArModel};
use arpex::bench::write_noise;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let steps = 200_000;
    println!("{:>6} {:>12} {:>9} {:>9} {:>12}", "alpha", "noise std", "mean", "var", "mean |dx|");
    for alpha in [0.0, 0.5, 0.8, 0.9, 0.95] {
        let model = ArModel::binomial(3, alpha)?;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let xs = sample_path(&model, steps + model.burn_in(), &mut rng);
        let xs = &xs[model.burn_in()..];
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let roughness = xs.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / (n - 1.0);
        println!("{alpha:>6} {:>12.3e} {mean:>9.4} {var:>9.4} {roughness:>12.4}", model.noise_std());
    }

    if let Some(path) = std::env::args().nth(1) {
        let model = ArModel::binomial(3, 0.8)?;
        let xs = sample_path(&model, 1000, &mut ChaCha8Rng::seed_from_u64(42));
        write_noise(std::fs::File::create(&path)?, &xs)?;
        println!("wrote {path}");
    }
    Ok(())
}
