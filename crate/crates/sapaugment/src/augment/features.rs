//! Log-mel feature matrices and the waveform front end.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::wav::Waveform;
use crate::error::{Error, Result};

/// T×F matrix of log-mel-style features, row-major (one row per time frame).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    num_frames: usize,
    num_bins: usize,
    frame_hop_ms: f64,
    frame_len_ms: f64,
}

impl FeatureMatrix {
    pub fn new(
        data: Vec<f64>,
        num_frames: usize,
        num_bins: usize,
        frame_hop_ms: f64,
        frame_len_ms: f64,
    ) -> Result<Self> {
        if num_frames == 0 || num_bins == 0 {
            return Err(Error::input("feature matrix must have at least one frame and one bin"));
        }
        if data.len() != num_frames * num_bins {
            return Err(Error::input(format!(
                "feature data length {} does not match {num_frames}x{num_bins}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("feature entries must be finite"));
        }
        if !frame_hop_ms.is_finite()
            || frame_hop_ms <= 0.0
            || !frame_len_ms.is_finite()
            || frame_len_ms <= 0.0
        {
            return Err(Error::input("frame hop and length must be positive"));
        }
        Ok(FeatureMatrix { data, num_frames, num_bins, frame_hop_ms, frame_len_ms })
    }

    /// Number of time frames T.
    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    /// Number of frequency bins F.
    pub fn num_bins(&self) -> usize {
        self.num_bins
    }

    pub fn frame_hop_ms(&self) -> f64 {
        self.frame_hop_ms
    }

    pub fn frame_len_ms(&self) -> f64 {
        self.frame_len_ms
    }

    pub fn at(&self, frame: usize, bin: usize) -> f64 {
        self.data[frame * self.num_bins + bin]
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.num_bins..(t + 1) * self.num_bins]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn with_same_layout(&self, data: Vec<f64>, num_frames: usize) -> FeatureMatrix {
        FeatureMatrix {
            data,
            num_frames,
            num_bins: self.num_bins,
            frame_hop_ms: self.frame_hop_ms,
            frame_len_ms: self.frame_len_ms,
        }
    }

    /// Column mean over all frames (one value per bin). Computed about the
    /// first frame as pivot so a constant column averages to exactly its
    /// value.
    pub fn per_bin_mean(&self) -> Vec<f64> {
        let pivot = self.frame(0).to_vec();
        let mut sums = vec![0.0f64; self.num_bins];
        for t in 0..self.num_frames {
            let row = self.frame(t);
            for ((s, v), p) in sums.iter_mut().zip(row).zip(&pivot) {
                *s += v - p;
            }
        }
        let n = self.num_frames as f64;
        sums.iter()
            .zip(&pivot)
            .map(|(s, p)| p + s / n)
            .collect()
    }

    /// Row mean per frame (one value per frame), pivoted like
    /// [`Self::per_bin_mean`].
    pub fn per_frame_mean(&self) -> Vec<f64> {
        (0..self.num_frames)
            .map(|t| {
                let row = self.frame(t);
                let pivot = row[0];
                pivot + row.iter().map(|v| v - pivot).sum::<f64>() / self.num_bins as f64
            })
            .collect()
    }
}

/// Front-end settings: 25 ms Hann window, 10 ms hop, 80 mel bins, natural
/// log with a 1e-10 power floor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeaturizerConfig {
    pub frame_len_ms: f64,
    pub frame_hop_ms: f64,
    pub num_mel_bins: usize,
    pub log_floor: f64,
}

impl Default for FeaturizerConfig {
    fn default() -> Self {
        FeaturizerConfig {
            frame_len_ms: 25.0,
            frame_hop_ms: 10.0,
            num_mel_bins: 80,
            log_floor: 1e-10,
        }
    }
}

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Center frequencies (Hz) of the triangular mel filters for the given
/// configuration; bin `m`'s filter peaks at element `m`.
pub fn mel_filter_centers_hz(config: &FeaturizerConfig, sample_rate: u32) -> Vec<f64> {
    let mel_max = hz_to_mel(sample_rate as f64 / 2.0);
    (1..=config.num_mel_bins)
        .map(|m| mel_to_hz(mel_max * m as f64 / (config.num_mel_bins + 1) as f64))
        .collect()
}

/// Reusable log-mel front end bound to one sample rate.
///
/// Framing: `T = 1 + ⌊(len − window) / hop⌋` for inputs of at least one
/// window; shorter inputs yield a single zero-padded frame.
pub struct Featurizer {
    config: FeaturizerConfig,
    sample_rate: u32,
    window_len: usize,
    hop_len: usize,
    n_fft: usize,
    hann: Vec<f64>,
    // one (first_fft_bin, weights) pair per mel bin
    filters: Vec<(usize, Vec<f64>)>,
    fft: Arc<dyn Fft<f64>>,
}

impl Featurizer {
    pub fn new(config: FeaturizerConfig, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::input("sample rate must be positive"));
        }
        if config.num_mel_bins == 0 {
            return Err(Error::input("need at least one mel bin"));
        }
        if !config.frame_len_ms.is_finite()
            || config.frame_len_ms <= 0.0
            || !config.frame_hop_ms.is_finite()
            || config.frame_hop_ms <= 0.0
        {
            return Err(Error::input("frame length and hop must be positive"));
        }
        let window_len = ((config.frame_len_ms / 1000.0) * sample_rate as f64).round() as usize;
        let hop_len = ((config.frame_hop_ms / 1000.0) * sample_rate as f64).round() as usize;
        if window_len == 0 || hop_len == 0 {
            return Err(Error::input("frame length and hop must span at least one sample"));
        }
        let n_fft = window_len.next_power_of_two();
        let hann: Vec<f64> = (0..window_len)
            .map(|n| {
                let phase = 2.0 * std::f64::consts::PI * n as f64 / (window_len - 1).max(1) as f64;
                0.5 - 0.5 * phase.cos()
            })
            .collect();
        let filters = build_mel_filters(&config, sample_rate, n_fft);
        let fft = FftPlanner::new().plan_fft_forward(n_fft);
        Ok(Featurizer { config, sample_rate, window_len, hop_len, n_fft, hann, filters, fft })
    }

    pub fn config(&self) -> &FeaturizerConfig {
        &self.config
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop_len(&self) -> usize {
        self.hop_len
    }

    /// Expected frame count for an input of `len` samples.
    pub fn num_frames_for(&self, len: usize) -> usize {
        if len < self.window_len {
            1
        } else {
            1 + (len - self.window_len) / self.hop_len
        }
    }

    /// Log-mel features of a waveform. Deterministic.
    pub fn featurize(&self, wave: &Waveform) -> Result<FeatureMatrix> {
        if wave.sample_rate() != self.sample_rate {
            return Err(Error::input(format!(
                "featurizer built for {} Hz, waveform is {} Hz",
                self.sample_rate,
                wave.sample_rate()
            )));
        }
        let samples = wave.samples();
        let num_frames = self.num_frames_for(samples.len());
        let num_bins = self.config.num_mel_bins;
        let mut out = vec![0.0f64; num_frames * num_bins];

        let mut buffer = vec![Complex::new(0.0, 0.0); self.n_fft];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut magnitudes = vec![0.0f64; self.n_fft / 2 + 1];

        for t in 0..num_frames {
            let start = t * self.hop_len;
            buffer.iter_mut().for_each(|c| *c = Complex::new(0.0, 0.0));
            for (slot, (n, &w)) in buffer.iter_mut().zip(self.hann.iter().enumerate()) {
                let s = samples.get(start + n).copied().unwrap_or(0.0);
                *slot = Complex::new(s * w, 0.0);
            }
            self.fft.process_with_scratch(&mut buffer, &mut scratch);
            for (k, m) in magnitudes.iter_mut().enumerate() {
                *m = buffer[k].norm();
            }
            let row = &mut out[t * num_bins..(t + 1) * num_bins];
            for (m, (first, weights)) in self.filters.iter().enumerate() {
                let energy: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| w * magnitudes[first + i])
                    .sum();
                row[m] = energy.max(self.config.log_floor).ln();
            }
        }

        FeatureMatrix::new(
            out,
            num_frames,
            num_bins,
            self.config.frame_hop_ms,
            self.config.frame_len_ms,
        )
    }
}

/// One-off featurization; build a [`Featurizer`] to amortize setup.
pub fn featurize(wave: &Waveform, config: &FeaturizerConfig) -> Result<FeatureMatrix> {
    Featurizer::new(*config, wave.sample_rate())?.featurize(wave)
}

fn build_mel_filters(
    config: &FeaturizerConfig,
    sample_rate: u32,
    n_fft: usize,
) -> Vec<(usize, Vec<f64>)> {
    let nyquist = sample_rate as f64 / 2.0;
    let mel_max = hz_to_mel(nyquist);
    let num_mel = config.num_mel_bins;
    // num_mel + 2 corner points, equally spaced on the mel axis
    let corners_hz: Vec<f64> = (0..num_mel + 2)
        .map(|i| mel_to_hz(mel_max * i as f64 / (num_mel + 1) as f64))
        .collect();
    let bin_hz = sample_rate as f64 / n_fft as f64;
    let num_fft_bins = n_fft / 2 + 1;

    let mut filters = Vec::with_capacity(num_mel);
    for m in 0..num_mel {
        let (lo, mid, hi) = (corners_hz[m], corners_hz[m + 1], corners_hz[m + 2]);
        let mut first = None;
        let mut weights = Vec::new();
        for k in 0..num_fft_bins {
            let f = k as f64 * bin_hz;
            let rising = (f - lo) / (mid - lo);
            let falling = (hi - f) / (hi - mid);
            let w = rising.min(falling).max(0.0);
            if w > 0.0 {
                if first.is_none() {
                    first = Some(k);
                }
                weights.push(w);
            } else if first.is_some() {
                break;
            }
        }
        // very narrow low filters may cover no FFT bin; keep an empty filter
        // (constant ln(floor) output) rather than shifting indices
        filters.push((first.unwrap_or(0), weights));
    }
    filters
}
