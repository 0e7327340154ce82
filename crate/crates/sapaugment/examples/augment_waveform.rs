//! Applies each of the five transforms to a synthesized clip and writes the
//! results (WAV files for the raw-domain transforms, SAPF feature files for
//! the feature-domain ones) into ./augment_demo/.
//!
//! Run: cargo run -p sapaugment --example augment_waveform

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sapaugment::augment::{
    cutmix, featurize, freq_mask, map_lambda, sample_pairing, time_mask, time_stretch,
    write_feature_binary, write_wav, AugmentationKind, AugmentationStrength, FeaturizerConfig,
    Waveform,
};

fn tone(freq: f64, secs: f64) -> Waveform {
    let rate = 16_000u32;
    let n = (rate as f64 * secs) as usize;
    let samples = (0..n)
        .map(|i| 0.45 * (std::f64::consts::TAU * freq * i as f64 / rate as f64).sin())
        .collect();
    Waveform::new(samples, rate).unwrap()
}

fn main() -> sapaugment::Result<()> {
    let out_dir = std::path::Path::new("augment_demo");
    std::fs::create_dir_all(out_dir)?;

    let clip = tone(440.0, 1.0);
    let partner = tone(1320.0, 0.7);
    let config = FeaturizerConfig::default();
    let lambda = 0.75;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("λ = {lambda}; parameters from the per-kind maps:");
    for kind in AugmentationKind::ALL {
        let strength = map_lambda(kind, lambda)?;
        println!("  {:<14} -> {:?}", kind.name(), strength);
    }

    // raw domain
    if let AugmentationStrength::SamplePairing { weight } =
        map_lambda(AugmentationKind::SamplePairing, lambda)?
    {
        let mixed = sample_pairing(&clip, &partner, weight)?;
        write_wav(out_dir.join("sample_pairing.wav"), &mixed)?;
    }
    if let AugmentationStrength::CutMix { width } = map_lambda(AugmentationKind::CutMix, lambda)? {
        let cut = cutmix(&clip, &partner, width, 6, &mut rng)?;
        write_wav(out_dir.join("cutmix.wav"), &cut)?;
    }

    // feature domain
    let feat = featurize(&clip, &config)?;
    println!(
        "clean features: {} frames x {} mel bins",
        feat.num_frames(),
        feat.num_bins()
    );
    if let AugmentationStrength::TimeStretch { max_ratio } =
        map_lambda(AugmentationKind::TimeStretch, lambda)?
    {
        let stretched = time_stretch(&feat, max_ratio, &mut rng)?;
        println!("time stretch: {} -> {} frames", feat.num_frames(), stretched.num_frames());
        write_feature_binary(out_dir.join("time_stretch.sapf"), &stretched)?;
    }
    if let AugmentationStrength::TimeMask { frames } =
        map_lambda(AugmentationKind::TimeMask, lambda)?
    {
        let masked = time_mask(&feat, frames, 4, &mut rng)?;
        write_feature_binary(out_dir.join("time_mask.sapf"), &masked)?;
    }
    if let AugmentationStrength::FreqMask { bins } = map_lambda(AugmentationKind::FreqMask, lambda)?
    {
        let masked = freq_mask(&feat, bins, 4, &mut rng)?;
        write_feature_binary(out_dir.join("freq_mask.sapf"), &masked)?;
    }

    println!("wrote WAV and SAPF outputs under {}", out_dir.display());
    Ok(())
}
