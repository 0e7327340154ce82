//! Generates the synthetic four-class dataset, trains the tiny classifier
//! without any augmentation, and reports validation accuracy per seed.
//!
//! Run: cargo run --release -p sapaugment --example synthetic_baseline

use sapaugment::harness::{generate_dataset, DatasetConfig, PreparedDataset, TrainConfig};
use sapaugment::policy::PolicySet;

fn main() -> sapaugment::Result<()> {
    let dataset = generate_dataset(&DatasetConfig::default(), 0)?;
    println!(
        "dataset: {} train / {} val clips, {} classes, {} Hz",
        dataset.train.len(),
        dataset.val.len(),
        dataset.config.num_classes,
        dataset.config.sample_rate
    );

    let t0 = std::time::Instant::now();
    let prepared = PreparedDataset::new(dataset)?;
    println!("clean featurization: {} ms", t0.elapsed().as_millis());

    let train = TrainConfig::default();
    let start = std::time::Instant::now();
    for seed in 0..5u64 {
        let t0 = std::time::Instant::now();
        let outcome = prepared.train_and_evaluate(&PolicySet::disabled(), &train, seed)?;
        println!(
            "seed {seed}: baseline accuracy {:.4} ({} ms{})",
            outcome.accuracy,
            t0.elapsed().as_millis(),
            if outcome.diverged { ", diverged" } else { "" }
        );
    }
    println!("5 baseline runs: {:.2} s", start.elapsed().as_secs_f64());

    // the same loop under an always-on moderate policy, for comparison
    let policies = PolicySet::uniform(sapaugment::policy::PolicyParams::new(8.0, 0.5, 1.0)?);
    for seed in 0..3u64 {
        let t0 = std::time::Instant::now();
        let outcome = prepared.train_and_evaluate(&policies, &train, seed)?;
        println!(
            "seed {seed}: always-augment accuracy {:.4} ({} ms)",
            outcome.accuracy,
            t0.elapsed().as_millis()
        );
    }
    Ok(())
}
