//! The five augmentation transforms and the λ → parameter maps.
//!
//! Three transforms operate on log-mel feature matrices (time masking,
//! frequency masking, time stretching) and two on raw waveforms
//! (sample pairing, cutmix). Each carries exactly one magnitude parameter,
//! reached from the policy output λ ∈ [0, 1] through [`map_lambda`]:
//!
//! | kind            | parameter | range        | map              |
//! |-----------------|-----------|--------------|------------------|
//! | time masking    | m_t       | {2,…,6}      | ⌊2 + 4λ⌋         |
//! | freq masking    | m_f       | {2,…,6}      | ⌊2 + 4λ⌋         |
//! | time stretching | ρ0        | [0.2, 0.6]   | 0.2 + 0.4λ       |
//! | sample pairing  | λ_sp      | [0, 0.1]     | 0.1λ             |
//! | cutmix          | w         | [1600, 4800] | 1600 + 3200λ     |
//!
//! All transforms are pure: randomness comes from a caller-supplied
//! generator, and the identity parameter of each transform reproduces its
//! input bit-exactly.

mod featfile;
mod features;
mod wav;

pub use featfile::{
    decode_feature_binary, decode_feature_csv, encode_feature_binary, encode_feature_csv,
    read_feature_binary, read_feature_csv, write_feature_binary, write_feature_csv,
};
pub use features::{
    featurize, mel_filter_centers_hz, FeatureMatrix, Featurizer, FeaturizerConfig,
};
pub use wav::{decode_wav, encode_wav, read_wav, write_wav, Waveform, DEFAULT_SAMPLE_RATE};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of masked blocks per masking call.
pub const DEFAULT_NUM_MASKS: usize = 4;
/// Number of replaced segments per cutmix call.
pub const DEFAULT_NUM_CUT_SEGMENTS: usize = 6;

/// The five augmentation methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentationKind {
    TimeMask,
    FreqMask,
    TimeStretch,
    SamplePairing,
    CutMix,
}

impl AugmentationKind {
    pub const COUNT: usize = 5;

    /// Canonical order, used for policy vectors and JSON layouts.
    pub const ALL: [AugmentationKind; Self::COUNT] = [
        AugmentationKind::TimeMask,
        AugmentationKind::FreqMask,
        AugmentationKind::TimeStretch,
        AugmentationKind::SamplePairing,
        AugmentationKind::CutMix,
    ];

    pub fn index(self) -> usize {
        match self {
            AugmentationKind::TimeMask => 0,
            AugmentationKind::FreqMask => 1,
            AugmentationKind::TimeStretch => 2,
            AugmentationKind::SamplePairing => 3,
            AugmentationKind::CutMix => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AugmentationKind::TimeMask => "time_mask",
            AugmentationKind::FreqMask => "freq_mask",
            AugmentationKind::TimeStretch => "time_stretch",
            AugmentationKind::SamplePairing => "sample_pairing",
            AugmentationKind::CutMix => "cutmix",
        }
    }

    /// True for the two transforms that act on waveforms before the front
    /// end.
    pub fn is_raw_domain(self) -> bool {
        matches!(self, AugmentationKind::SamplePairing | AugmentationKind::CutMix)
    }
}

/// One augmentation's magnitude parameter, produced by [`map_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AugmentationStrength {
    /// m_t: frames per time mask.
    TimeMask { frames: usize },
    /// m_f: bins per frequency mask.
    FreqMask { bins: usize },
    /// ρ0: half-width of the stretch-ratio distribution U(−ρ0, ρ0).
    TimeStretch { max_ratio: f64 },
    /// λ_sp: mixing weight of the partner waveform.
    SamplePairing { weight: f64 },
    /// w: replaced-segment width in samples.
    CutMix { width: usize },
}

impl AugmentationStrength {
    pub fn kind(&self) -> AugmentationKind {
        match self {
            AugmentationStrength::TimeMask { .. } => AugmentationKind::TimeMask,
            AugmentationStrength::FreqMask { .. } => AugmentationKind::FreqMask,
            AugmentationStrength::TimeStretch { .. } => AugmentationKind::TimeStretch,
            AugmentationStrength::SamplePairing { .. } => AugmentationKind::SamplePairing,
            AugmentationStrength::CutMix { .. } => AugmentationKind::CutMix,
        }
    }

    /// The parameter as a plain number (for displays and monotonicity
    /// checks).
    pub fn scalar(&self) -> f64 {
        match *self {
            AugmentationStrength::TimeMask { frames } => frames as f64,
            AugmentationStrength::FreqMask { bins } => bins as f64,
            AugmentationStrength::TimeStretch { max_ratio } => max_ratio,
            AugmentationStrength::SamplePairing { weight } => weight,
            AugmentationStrength::CutMix { width } => width as f64,
        }
    }
}

/// Maps the policy output λ to the augmentation parameter of `kind`.
pub fn map_lambda(kind: AugmentationKind, lambda: f64) -> Result<AugmentationStrength> {
    if !lambda.is_finite() || !(0.0..=1.0).contains(&lambda) {
        return Err(Error::input(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(match kind {
        AugmentationKind::TimeMask => {
            AugmentationStrength::TimeMask { frames: (2.0 + 4.0 * lambda).floor() as usize }
        }
        AugmentationKind::FreqMask => {
            AugmentationStrength::FreqMask { bins: (2.0 + 4.0 * lambda).floor() as usize }
        }
        AugmentationKind::TimeStretch => {
            // evaluated as a lerp so both endpoints are exact
            AugmentationStrength::TimeStretch { max_ratio: 0.2 * (1.0 - lambda) + 0.6 * lambda }
        }
        AugmentationKind::SamplePairing => {
            AugmentationStrength::SamplePairing { weight: 0.1 * lambda }
        }
        AugmentationKind::CutMix => {
            AugmentationStrength::CutMix {
                width: (1600.0 * (1.0 - lambda) + 4800.0 * lambda).round() as usize,
            }
        }
    })
}

/// Masks `num_masks` blocks of `mask_len` consecutive frames at uniformly
/// random starts, filling each masked entry (t, f) with the temporal mean of
/// bin f over the whole input.
///
/// Draw protocol: exactly `num_masks` draws of `random_range(0..=T−len)`, in
/// order. A `mask_len` beyond T is clamped to T.
pub fn time_mask<R: Rng + ?Sized>(
    feat: &FeatureMatrix,
    mask_len: usize,
    num_masks: usize,
    rng: &mut R,
) -> Result<FeatureMatrix> {
    if mask_len == 0 {
        return Err(Error::input("time mask length must be at least 1"));
    }
    let t = feat.num_frames();
    let f = feat.num_bins();
    let len = mask_len.min(t);
    let means = feat.per_bin_mean();
    let mut out = feat.clone();
    for _ in 0..num_masks {
        let start = rng.random_range(0..=t - len);
        for frame in start..start + len {
            out.data_mut()[frame * f..(frame + 1) * f].copy_from_slice(&means);
        }
    }
    Ok(out)
}

/// Symmetric to [`time_mask`] with axes swapped: masks blocks of `mask_len`
/// consecutive bins, filling entry (t, f) with the mean over all bins of
/// frame t.
pub fn freq_mask<R: Rng + ?Sized>(
    feat: &FeatureMatrix,
    mask_len: usize,
    num_masks: usize,
    rng: &mut R,
) -> Result<FeatureMatrix> {
    if mask_len == 0 {
        return Err(Error::input("frequency mask length must be at least 1"));
    }
    let f = feat.num_bins();
    let len = mask_len.min(f);
    let means = feat.per_frame_mean();
    let mut out = feat.clone();
    for _ in 0..num_masks {
        let start = rng.random_range(0..=f - len);
        for (row, &mean) in out.data_mut().chunks_mut(f).zip(&means) {
            row[start..start + len].iter_mut().for_each(|v| *v = mean);
        }
    }
    Ok(out)
}

/// Re-samples the frame sequence by a ratio ρ drawn from U(−ρ0, ρ0):
/// the output has ⌊(1+ρ)T⌋ frames, frame i copying source frame ⌊i/(1+ρ)⌋.
pub fn time_stretch<R: Rng + ?Sized>(
    feat: &FeatureMatrix,
    rho0: f64,
    rng: &mut R,
) -> Result<FeatureMatrix> {
    if !rho0.is_finite() || !(0.0..1.0).contains(&rho0) {
        return Err(Error::input(format!("stretch half-width must lie in [0, 1), got {rho0}")));
    }
    let rho = if rho0 == 0.0 { 0.0 } else { rng.random_range(-rho0..rho0) };
    time_stretch_by(feat, rho)
}

/// [`time_stretch`] with the ratio fixed by the caller.
pub fn time_stretch_by(feat: &FeatureMatrix, rho: f64) -> Result<FeatureMatrix> {
    if !rho.is_finite() || rho <= -1.0 {
        return Err(Error::input(format!("stretch ratio must be > -1, got {rho}")));
    }
    let t = feat.num_frames();
    let f = feat.num_bins();
    let scale = 1.0 + rho;
    let new_t = (scale * t as f64).floor() as usize;
    if new_t == 0 {
        // degenerate shrink of a very short input
        return Ok(feat.with_same_layout(feat.frame(0).to_vec(), 1));
    }
    let mut data = Vec::with_capacity(new_t * f);
    for i in 0..new_t {
        let src = ((i as f64 / scale).floor() as usize).min(t - 1);
        data.extend_from_slice(feat.frame(src));
    }
    Ok(feat.with_same_layout(data, new_t))
}

/// Convex waveform mix x' = (1−λ_sp)·x_i + λ_sp·x_j. The partner is tiled
/// (repeated) or truncated to the length of `x_i` first; the result is
/// clipped to [−1, 1].
pub fn sample_pairing(x_i: &Waveform, x_j: &Waveform, lambda_sp: f64) -> Result<Waveform> {
    if !lambda_sp.is_finite() || !(0.0..=0.1).contains(&lambda_sp) {
        return Err(Error::input(format!("pairing weight must lie in [0, 0.1], got {lambda_sp}")));
    }
    if x_i.sample_rate() != x_j.sample_rate() {
        return Err(Error::input(format!(
            "sample-rate mismatch: {} vs {}",
            x_i.sample_rate(),
            x_j.sample_rate()
        )));
    }
    if lambda_sp == 0.0 {
        return Ok(x_i.clone());
    }
    let partner = x_j.samples();
    let mixed: Vec<f64> = x_i
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &s)| ((1.0 - lambda_sp) * s + lambda_sp * partner[i % partner.len()]).clamp(-1.0, 1.0))
        .collect();
    Ok(Waveform::from_parts_unchecked(mixed, x_i.sample_rate()))
}

/// Replaces `num_segments` segments of `width` samples of `x_i` with
/// segments of `x_j` at independently uniform positions; later segments
/// overwrite earlier ones on overlap.
///
/// Draw protocol per segment, in order: start in `x_i`
/// (`random_range(0..=len_i−w)`), then start in `x_j`
/// (`random_range(0..=len_j−w)`). A `width` beyond either length is reduced
/// to the shorter length.
pub fn cutmix<R: Rng + ?Sized>(
    x_i: &Waveform,
    x_j: &Waveform,
    width: usize,
    num_segments: usize,
    rng: &mut R,
) -> Result<Waveform> {
    if width == 0 {
        return Err(Error::input("cutmix segment width must be at least 1"));
    }
    if x_i.sample_rate() != x_j.sample_rate() {
        return Err(Error::input(format!(
            "sample-rate mismatch: {} vs {}",
            x_i.sample_rate(),
            x_j.sample_rate()
        )));
    }
    let len_i = x_i.len();
    let len_j = x_j.len();
    let w = width.min(len_i).min(len_j);
    let mut out = x_i.samples().to_vec();
    for _ in 0..num_segments {
        let t_i = rng.random_range(0..=len_i - w);
        let t_j = rng.random_range(0..=len_j - w);
        out[t_i..t_i + w].copy_from_slice(&x_j.samples()[t_j..t_j + w]);
    }
    Ok(Waveform::from_parts_unchecked(out, x_i.sample_rate()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn matrix(t: usize, f: usize, gen: impl Fn(usize, usize) -> f64) -> FeatureMatrix {
        let mut data = Vec::with_capacity(t * f);
        for i in 0..t {
            for j in 0..f {
                data.push(gen(i, j));
            }
        }
        FeatureMatrix::new(data, t, f, 10.0, 25.0).unwrap()
    }

    fn wave(samples: Vec<f64>) -> Waveform {
        Waveform::new(samples, DEFAULT_SAMPLE_RATE).unwrap()
    }

    #[test]
    fn table_endpoints_and_midpoints() {
        use AugmentationKind::*;
        use AugmentationStrength as S;
        assert_eq!(map_lambda(TimeMask, 0.0).unwrap(), S::TimeMask { frames: 2 });
        assert_eq!(map_lambda(TimeMask, 1.0).unwrap(), S::TimeMask { frames: 6 });
        assert_eq!(map_lambda(FreqMask, 0.0).unwrap(), S::FreqMask { bins: 2 });
        assert_eq!(map_lambda(FreqMask, 1.0).unwrap(), S::FreqMask { bins: 6 });
        assert_eq!(map_lambda(TimeStretch, 0.0).unwrap(), S::TimeStretch { max_ratio: 0.2 });
        assert_eq!(map_lambda(TimeStretch, 1.0).unwrap(), S::TimeStretch { max_ratio: 0.6 });
        assert_eq!(map_lambda(SamplePairing, 0.0).unwrap(), S::SamplePairing { weight: 0.0 });
        assert_eq!(map_lambda(SamplePairing, 1.0).unwrap(), S::SamplePairing { weight: 0.1 });
        assert_eq!(map_lambda(CutMix, 0.0).unwrap(), S::CutMix { width: 1600 });
        assert_eq!(map_lambda(CutMix, 0.5).unwrap(), S::CutMix { width: 3200 });
        assert_eq!(map_lambda(CutMix, 1.0).unwrap(), S::CutMix { width: 4800 });
    }

    #[test]
    fn map_rejects_out_of_range_lambda() {
        assert!(map_lambda(AugmentationKind::TimeMask, -0.01).is_err());
        assert!(map_lambda(AugmentationKind::CutMix, 1.01).is_err());
        assert!(map_lambda(AugmentationKind::CutMix, f64::NAN).is_err());
    }

    #[test]
    fn time_mask_constant_input_unchanged() {
        let m = matrix(10, 4, |_, _| 2.5);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = time_mask(&m, 3, 4, &mut rng).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn time_mask_alters_exactly_the_drawn_frames() {
        let m = matrix(10, 2, |t, f| (t * 10 + f) as f64);
        let seed = 7u64;
        let out = time_mask(&m, 3, 1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();

        // oracle: replay the draw protocol and recompute the fill values
        let mut replay = ChaCha8Rng::seed_from_u64(seed);
        let start = replay.random_range(0..=10 - 3);
        let mean = |f: usize| (0..10).map(|t| m.at(t, f)).sum::<f64>() / 10.0;
        let mut changed = Vec::new();
        for t in 0..10 {
            if (0..2).any(|f| out.at(t, f) != m.at(t, f)) {
                changed.push(t);
            }
        }
        assert_eq!(changed, (start..start + 3).collect::<Vec<_>>());
        for t in start..start + 3 {
            for f in 0..2 {
                assert!((out.at(t, f) - mean(f)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn time_mask_full_length_means_everywhere() {
        let m = matrix(6, 3, |t, f| (t as f64).sin() + f as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = time_mask(&m, 6, 2, &mut rng).unwrap();
        let means = m.per_bin_mean();
        for t in 0..6 {
            for (f, mean) in means.iter().enumerate() {
                assert_eq!(out.at(t, f), *mean);
            }
        }
        // oversized mask clamps and behaves the same
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let clamped = time_mask(&m, 100, 2, &mut rng).unwrap();
        assert_eq!(clamped, out);
    }

    #[test]
    fn freq_mask_constant_input_unchanged() {
        let m = matrix(5, 8, |_, _| -1.25);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let out = freq_mask(&m, 3, 4, &mut rng).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn freq_mask_bounded_alteration() {
        // 4 masks of 6 bins alter at most 24 bins per frame
        let m = matrix(4, 80, |t, f| (t + f) as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = freq_mask(&m, 6, 4, &mut rng).unwrap();
        for t in 0..4 {
            let changed = (0..80).filter(|&f| out.at(t, f) != m.at(t, f)).count();
            assert!(changed <= 24, "frame {t} changed {changed} bins");
        }
    }

    #[test]
    fn freq_mask_full_width_gives_frame_means() {
        let m = matrix(3, 5, |t, f| (t * 7 + f * 3) as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = freq_mask(&m, 5, 1, &mut rng).unwrap();
        let means = m.per_frame_mean();
        for (t, mean) in means.iter().enumerate() {
            for f in 0..5 {
                assert_eq!(out.at(t, f), *mean);
            }
        }
    }

    #[test]
    fn mask_alters_recomputed_sets_on_many_seeds() {
        let m = matrix(32, 16, |t, f| ((t * 31 + f * 17) % 13) as f64);
        for seed in 0..100u64 {
            let out = time_mask(&m, 5, 4, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let mut replay = ChaCha8Rng::seed_from_u64(seed);
            let mut masked = [false; 32];
            for _ in 0..4 {
                let start = replay.random_range(0..=32 - 5);
                masked[start..start + 5].iter_mut().for_each(|x| *x = true);
            }
            let means = m.per_bin_mean();
            for (t, hit) in masked.iter().enumerate() {
                for (f, mean) in means.iter().enumerate() {
                    if *hit {
                        assert_eq!(out.at(t, f), *mean);
                    } else {
                        assert_eq!(out.at(t, f), m.at(t, f));
                    }
                }
            }
        }
    }

    #[test]
    fn stretch_identity_at_zero_ratio() {
        let m = matrix(12, 6, |t, f| (t as f64) * 0.5 - f as f64);
        assert_eq!(time_stretch_by(&m, 0.0).unwrap(), m);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(time_stretch(&m, 0.0, &mut rng).unwrap(), m);
    }

    #[test]
    fn stretch_expansion_indices() {
        // T = 4, ρ = +0.5: 6 output frames from sources [0, 0, 1, 2, 2, 3]
        let m = matrix(4, 1, |t, _| t as f64);
        let out = time_stretch_by(&m, 0.5).unwrap();
        assert_eq!(out.num_frames(), 6);
        let got: Vec<f64> = (0..6).map(|i| out.at(i, 0)).collect();
        assert_eq!(got, vec![0.0, 0.0, 1.0, 2.0, 2.0, 3.0]);
    }

    #[test]
    fn stretch_contraction_indices() {
        // T = 10, ρ = −0.5: 5 output frames, source index ⌊i/0.5⌋ = 2i
        let m = matrix(10, 1, |t, _| t as f64);
        let out = time_stretch_by(&m, -0.5).unwrap();
        assert_eq!(out.num_frames(), 5);
        let got: Vec<f64> = (0..5).map(|i| out.at(i, 0)).collect();
        let oracle: Vec<f64> = (0..5).map(|i| (i as f64 / 0.5).floor()).collect();
        assert_eq!(got, oracle);
    }

    #[test]
    fn stretch_degenerate_collapse_keeps_one_frame() {
        let m = matrix(1, 2, |_, f| f as f64);
        let out = time_stretch_by(&m, -0.5).unwrap();
        assert_eq!(out.num_frames(), 1);
        assert_eq!(out.frame(0), m.frame(0));
    }

    #[test]
    fn pairing_zero_weight_is_identity() {
        let a = wave(vec![0.1, -0.5, 0.9]);
        let b = wave(vec![0.7, 0.7, 0.7]);
        assert_eq!(sample_pairing(&a, &b, 0.0).unwrap(), a);
    }

    #[test]
    fn pairing_arithmetic() {
        let a = wave(vec![1.0, 1.0]);
        let b = wave(vec![0.0, 1.0]);
        let out = sample_pairing(&a, &b, 0.1).unwrap();
        assert!((out.samples()[0] - 0.9).abs() < 1e-15);
        assert!((out.samples()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pairing_tiles_short_partner() {
        let a = wave(vec![0.0; 5]);
        let b = wave(vec![0.4, -0.4]);
        let out = sample_pairing(&a, &b, 0.1).unwrap();
        let expect: Vec<f64> = [0.4, -0.4, 0.4, -0.4, 0.4].iter().map(|j| 0.1 * j).collect();
        for (got, want) in out.samples().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn pairing_rejects_bad_args() {
        let a = wave(vec![0.0; 4]);
        let b = Waveform::new(vec![0.0; 4], 8000).unwrap();
        assert!(sample_pairing(&a, &b, 0.05).is_err());
        let c = wave(vec![0.0; 4]);
        assert!(sample_pairing(&a, &c, 0.2).is_err());
        assert!(sample_pairing(&a, &c, -0.01).is_err());
    }

    #[test]
    fn cutmix_identical_content_is_identity() {
        // source and destination starts are drawn independently, so the
        // identity case is a partner whose every segment matches: constant
        // content (or the n_cm = 0 case below)
        let a = wave(vec![0.37; 2000]);
        let b = wave(vec![0.37; 1500]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = cutmix(&a, &b, 100, 6, &mut rng).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn cutmix_zero_segments_is_identity() {
        let a = wave(vec![0.1; 50]);
        let b = wave(vec![-0.1; 50]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let out = cutmix(&a, &b, 10, 0, &mut rng).unwrap();
        assert_eq!(out, a);
    }

    #[test]
    fn cutmix_replaces_recomputed_sets_on_many_seeds() {
        let a = wave(vec![0.5; 4000]);
        let b = wave(vec![-0.5; 4000]);
        for seed in 0..100u64 {
            let out = cutmix(&a, &b, 320, 6, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let mut replay = ChaCha8Rng::seed_from_u64(seed);
            let mut replaced = vec![false; 4000];
            for _ in 0..6 {
                let t_i = replay.random_range(0..=4000 - 320);
                let _t_j: usize = replay.random_range(0..=4000 - 320);
                replaced[t_i..t_i + 320].iter_mut().for_each(|x| *x = true);
            }
            for (i, (got, hit)) in out.samples().iter().zip(&replaced).enumerate() {
                let want = if *hit { -0.5 } else { 0.5 };
                assert_eq!(*got, want, "sample {i} seed {seed}");
            }
        }
    }

    #[test]
    fn cutmix_oversized_width_reduces_to_length() {
        let a = wave(vec![0.2; 100]);
        let b = wave(vec![-0.2; 100]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = cutmix(&a, &b, 5000, 1, &mut rng).unwrap();
        assert_eq!(out.samples(), b.samples());
    }

    #[test]
    fn cutmix_rejects_bad_args() {
        let a = wave(vec![0.0; 10]);
        let b = Waveform::new(vec![0.0; 10], 44_100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(cutmix(&a, &b, 4, 1, &mut rng).is_err());
        let c = wave(vec![0.0; 10]);
        assert!(cutmix(&a, &c, 0, 1, &mut rng).is_err());
    }

    #[test]
    fn transforms_deterministic_under_fixed_seed() {
        let m = matrix(20, 8, |t, f| ((t * 3 + f) as f64).cos());
        let a = wave((0..3000).map(|i| ((i % 71) as f64 / 50.0) - 0.5).collect());
        let b = wave((0..2500).map(|i| ((i % 37) as f64 / 30.0) - 0.4).collect());
        let run = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tm = time_mask(&m, 3, 4, &mut rng).unwrap();
            let fm = freq_mask(&m, 2, 4, &mut rng).unwrap();
            let ts = time_stretch(&m, 0.4, &mut rng).unwrap();
            let cm = cutmix(&a, &b, 500, 6, &mut rng).unwrap();
            (tm, fm, ts, cm)
        };
        assert_eq!(run(123), run(123));
    }

    proptest! {
        #[test]
        fn stretch_length_law(t in 1usize..200, rho in -0.6f64..0.6) {
            let m = matrix(t, 2, |i, j| (i + j) as f64);
            let out = time_stretch_by(&m, rho).unwrap();
            let want = ((1.0 + rho) * t as f64).floor() as usize;
            prop_assert_eq!(out.num_frames(), want.max(1));
            // every output frame copies a valid source frame, order-preserving
            let mut prev = 0.0f64;
            for i in 0..out.num_frames() {
                let v = out.at(i, 0);
                prop_assert!(v >= prev && v < t as f64);
                prev = v;
            }
        }

        #[test]
        fn map_lambda_monotone_and_in_range(
            l1 in 0.0f64..=1.0,
            l2 in 0.0f64..=1.0,
        ) {
            let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
            for kind in AugmentationKind::ALL {
                let a = map_lambda(kind, lo).unwrap();
                let b = map_lambda(kind, hi).unwrap();
                prop_assert!(a.scalar() <= b.scalar());
                let (min, max) = match kind {
                    AugmentationKind::TimeMask | AugmentationKind::FreqMask => (2.0, 6.0),
                    AugmentationKind::TimeStretch => (0.2, 0.6),
                    AugmentationKind::SamplePairing => (0.0, 0.1),
                    AugmentationKind::CutMix => (1600.0, 4800.0),
                };
                prop_assert!(a.scalar() >= min && a.scalar() <= max);
                prop_assert!(b.scalar() >= min && b.scalar() <= max);
            }
        }

        #[test]
        fn masking_preserves_shape(
            t in 1usize..24,
            f in 1usize..24,
            len in 1usize..30,
            seed in 0u64..100,
        ) {
            let m = matrix(t, f, |i, j| (i * j) as f64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tm = time_mask(&m, len, 4, &mut rng).unwrap();
            prop_assert_eq!((tm.num_frames(), tm.num_bins()), (t, f));
            let fm = freq_mask(&m, len, 4, &mut rng).unwrap();
            prop_assert_eq!((fm.num_frames(), fm.num_bins()), (t, f));
        }

        #[test]
        fn pairing_preserves_length_and_range(
            li in 1usize..500,
            lj in 1usize..500,
            weight in 0.0f64..=0.1,
            seed in 0u64..50,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = wave((0..li).map(|_| rng.random_range(-1.0..1.0)).collect());
            let b = wave((0..lj).map(|_| rng.random_range(-1.0..1.0)).collect());
            let out = sample_pairing(&a, &b, weight).unwrap();
            prop_assert_eq!(out.len(), a.len());
            prop_assert!(out.samples().iter().all(|s| (-1.0..=1.0).contains(s)));
        }
    }
}
