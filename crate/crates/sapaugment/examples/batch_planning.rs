//! Plans and applies augmentations for one mini-batch: ranks the losses,
//! evaluates λ per sample and per augmentation, draws selections and
//! partners, then prints the resulting plan.
//!
//! Run: cargo run -p sapaugment --example batch_planning

use sapaugment::augment::AugmentationKind;
use sapaugment::pipeline::{apply_plan, plan_batch, ApplyConfig, BatchSample};
use sapaugment::policy::{PolicyParams, PolicySet};
use sapaugment::augment::Waveform;

fn clip(freq: f64, len: usize) -> Waveform {
    let samples = (0..len)
        .map(|i| 0.4 * (std::f64::consts::TAU * freq * i as f64 / 16_000.0).sin())
        .collect();
    Waveform::new(samples, 16_000).unwrap()
}

fn main() -> sapaugment::Result<()> {
    // a batch of six clips with made-up training losses
    let losses = [0.42, 0.11, 0.93, 0.27, 0.61, 0.05];
    let batch: Vec<BatchSample> = losses
        .iter()
        .enumerate()
        .map(|(i, &clean_loss)| BatchSample {
            id: i as u64,
            waveform: clip(300.0 + 150.0 * i as f64, 12_000),
            label: i % 3,
            clean_loss,
        })
        .collect();

    let policies = PolicySet::new(|kind| {
        // sharper curves for the masks, always-on stretching, mild mixing
        match kind {
            AugmentationKind::TimeMask => PolicyParams::new(20.0, 0.6, 0.9),
            AugmentationKind::FreqMask => PolicyParams::new(20.0, 0.4, 0.9),
            AugmentationKind::TimeStretch => PolicyParams::new(2.0, 0.5, 1.0),
            AugmentationKind::SamplePairing => PolicyParams::new(6.0, 0.7, 0.5),
            AugmentationKind::CutMix => PolicyParams::new(6.0, 0.3, 0.25),
        }
        .unwrap()
    });

    let plan = plan_batch(&batch, &policies, 2024)?;
    println!("{:>4} {:>6} {:>6}  per-augmentation (selected / λ / parameter / partner)", "id", "loss", "rank");
    for (sample, planned) in batch.iter().zip(plan.samples()) {
        print!("{:>4} {:>6.2} {:>6}", sample.id, sample.clean_loss, planned.rank);
        for kind in AugmentationKind::ALL {
            let entry = planned.entry(kind);
            print!(
                "  {}{}:{:.2}/{:.3}{}",
                if entry.selected { "*" } else { " " },
                kind.name().split('_').next().unwrap(),
                entry.lambda,
                entry.strength.scalar(),
                entry.partner.map(|p| format!("/p{p}")).unwrap_or_default()
            );
        }
        println!();
    }

    let features = apply_plan(&batch, &plan, &ApplyConfig::default())?;
    println!();
    for (sample, feat) in batch.iter().zip(&features) {
        println!(
            "sample {}: {} frames x {} bins (label {} unchanged)",
            sample.id,
            feat.num_frames(),
            feat.num_bins(),
            sample.label
        );
    }
    Ok(())
}
