//! Mono waveforms and RIFF/WAVE PCM16 file I/O.

use std::path::Path;

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// Mono PCM waveform with samples in [−1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate: u32,
}

impl Waveform {
    /// Builds a waveform, clamping samples into [−1, 1] (PCM representable
    /// range). Rejects empty input, zero sample rates and non-finite samples.
    pub fn new(mut samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::input("waveform must contain at least one sample"));
        }
        if sample_rate == 0 {
            return Err(Error::input("sample rate must be positive"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::input("waveform samples must be finite"));
        }
        for s in samples.iter_mut() {
            *s = s.clamp(-1.0, 1.0);
        }
        Ok(Waveform { samples, sample_rate })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // enforced non-empty at construction
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<f64>, sample_rate: u32) -> Self {
        Waveform { samples, sample_rate }
    }
}

/// Reads a mono 16-bit PCM RIFF/WAVE file; samples are normalized to
/// [−1, 1] by dividing by 32768.
pub fn read_wav(path: impl AsRef<Path>) -> Result<Waveform> {
    let bytes = std::fs::read(path.as_ref())?;
    decode_wav(&bytes)
}

pub fn decode_wav(bytes: &[u8]) -> Result<Waveform> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::input("not a RIFF/WAVE file"));
    }
    let mut sample_rate = None;
    let mut data: Option<&[u8]> = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
        let body_end = (pos + 8).saturating_add(size).min(bytes.len());
        let body = &bytes[pos + 8..body_end];
        match id {
            b"fmt " => {
                if body.len() < 16 {
                    return Err(Error::input("truncated fmt chunk"));
                }
                let format = u16::from_le_bytes(body[0..2].try_into().unwrap());
                let channels = u16::from_le_bytes(body[2..4].try_into().unwrap());
                let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
                let bits = u16::from_le_bytes(body[14..16].try_into().unwrap());
                if format != 1 {
                    return Err(Error::input(format!("unsupported WAVE format tag {format}, want PCM")));
                }
                if channels != 1 {
                    return Err(Error::input(format!("expected mono audio, got {channels} channels")));
                }
                if bits != 16 {
                    return Err(Error::input(format!("expected 16-bit samples, got {bits}")));
                }
                sample_rate = Some(rate);
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunks are word-aligned
        pos = pos + 8 + size + (size & 1);
    }
    let rate = sample_rate.ok_or_else(|| Error::input("missing fmt chunk"))?;
    let data = data.ok_or_else(|| Error::input("missing data chunk"))?;
    let samples: Vec<f64> = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64 / 32768.0)
        .collect();
    Waveform::new(samples, rate)
}

/// Writes a mono 16-bit PCM RIFF/WAVE file (atomic: temp file + rename).
pub fn write_wav(path: impl AsRef<Path>, wave: &Waveform) -> Result<()> {
    write_atomic(path.as_ref(), &encode_wav(wave))
}

pub fn encode_wav(wave: &Waveform) -> Vec<u8> {
    let pcm: Vec<i16> = wave
        .samples()
        .iter()
        .map(|&s| (s * 32768.0).round().clamp(i16::MIN as f64, i16::MAX as f64) as i16)
        .collect();
    let data_len = (pcm.len() * 2) as u32;
    let riff_len = 4 + (8 + 16) + (8 + data_len);
    let mut out = Vec::with_capacity(8 + riff_len as usize);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_len.to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes()); // PCM
    out.extend_from_slice(&1u16.to_le_bytes()); // mono
    out.extend_from_slice(&wave.sample_rate().to_le_bytes());
    out.extend_from_slice(&(wave.sample_rate() * 2).to_le_bytes()); // byte rate
    out.extend_from_slice(&2u16.to_le_bytes()); // block align
    out.extend_from_slice(&16u16.to_le_bytes()); // bits per sample
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for s in &pcm {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}
