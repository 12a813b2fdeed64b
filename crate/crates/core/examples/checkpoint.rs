//! Save a briefly trained agent, load it back and confirm the restored
//! policy head produces the same action distribution.

use arpex::bench::PolicySpec;
use arpex::nn::Checkpoint;
use arpex::trainer::{TrainConfig, Trainer};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = TrainConfig {
        batch_size: 1024,
        opt_batch: 128,
        ..TrainConfig::default()
    };
    let mut trainer = Trainer::square(PolicySpec::arp(3, 0.8).build()?, 10.0, config, 1)?;
    trainer.run(300.0, |_| {})?;

    let path = std::env::temp_dir().join("arpex-example.ckpt");
    trainer.checkpoint().save(&path)?;
    let loaded = Checkpoint::load(&path)?;
    println!("{}", serde_json::to_string_pretty(&loaded.header())?);

    let obs = [0.3, -0.2, 0.0, 0.0, 2.1, 1.0];
    let before = trainer.agent.head.eval(&obs)?;
    let after = loaded.head.eval(&obs)?;
    println!("mean {:?} std {:?}", after.mean, after.std);
    assert_eq!(before, after);
    println!("restored head matches ({} bytes on disk)", std::fs::metadata(&path)?.len());
    Ok(())
}
