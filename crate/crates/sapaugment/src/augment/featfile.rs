//! Feature-matrix file formats.
//!
//! Binary: magic `SAPF`, then T and F as u32 little-endian, then T·F IEEE-754
//! f32 little-endian values row-major. CSV: a `T,F` header line, then T rows
//! of F decimal values printed with 9 significant digits (enough to round-trip
//! the 32-bit stored precision).
//!
//! Neither format carries frame timing; readers assume the default 25 ms / 10
//! ms framing.

use std::path::Path;

use super::features::FeatureMatrix;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

const MAGIC: &[u8; 4] = b"SAPF";
const DEFAULT_HOP_MS: f64 = 10.0;
const DEFAULT_LEN_MS: f64 = 25.0;

pub fn encode_feature_binary(feat: &FeatureMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + feat.values().len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(feat.num_frames() as u32).to_le_bytes());
    out.extend_from_slice(&(feat.num_bins() as u32).to_le_bytes());
    for &v in feat.values() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_feature_binary(bytes: &[u8]) -> Result<FeatureMatrix> {
    if bytes.len() < 12 || &bytes[0..4] != MAGIC {
        return Err(Error::input("not a SAPF feature file"));
    }
    let t = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let f = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let want = t
        .checked_mul(f)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| Error::input("feature dimensions overflow"))?;
    if bytes.len() != 12 + want {
        return Err(Error::input(format!(
            "feature payload is {} bytes, header {t}x{f} wants {want}",
            bytes.len() - 12
        )));
    }
    let data: Vec<f64> = bytes[12..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    FeatureMatrix::new(data, t, f, DEFAULT_HOP_MS, DEFAULT_LEN_MS)
}

pub fn write_feature_binary(path: impl AsRef<Path>, feat: &FeatureMatrix) -> Result<()> {
    write_atomic(path.as_ref(), &encode_feature_binary(feat))
}

pub fn read_feature_binary(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    decode_feature_binary(&std::fs::read(path.as_ref())?)
}

pub fn encode_feature_csv(feat: &FeatureMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("{},{}\n", feat.num_frames(), feat.num_bins()));
    for t in 0..feat.num_frames() {
        let row: Vec<String> = feat.frame(t).iter().map(|v| format!("{v:.8e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn decode_feature_csv(text: &str) -> Result<FeatureMatrix> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::input("empty feature CSV"))?;
    let dims: Vec<&str> = header.split(',').collect();
    if dims.len() != 2 {
        return Err(Error::input("feature CSV header must be `T,F`"));
    }
    let t: usize = dims[0]
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("bad frame count {:?}", dims[0])))?;
    let f: usize = dims[1]
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("bad bin count {:?}", dims[1])))?;
    let want = t
        .checked_mul(f)
        .ok_or_else(|| Error::input("feature dimensions overflow"))?;
    let mut data = Vec::with_capacity(want.min(1 << 24));
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("bad value {field:?} on row {}", i + 2)))?;
            data.push(v);
        }
    }
    if data.len() != want {
        return Err(Error::input(format!(
            "feature CSV has {} values, header {t}x{f} wants {want}",
            data.len()
        )));
    }
    FeatureMatrix::new(data, t, f, DEFAULT_HOP_MS, DEFAULT_LEN_MS)
}

pub fn write_feature_csv(path: impl AsRef<Path>, feat: &FeatureMatrix) -> Result<()> {
    write_atomic(path.as_ref(), encode_feature_csv(feat).as_bytes())
}

pub fn read_feature_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    decode_feature_csv(&std::fs::read_to_string(path.as_ref())?)
}
