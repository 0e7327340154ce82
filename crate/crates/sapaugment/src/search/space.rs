//! Box-bounded search spaces with per-dimension linear or log scaling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// One dimension: name, inclusive bounds, scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimSpec {
    pub name: String,
    pub low: f64,
    pub high: f64,
    #[serde(default)]
    pub scale: Scale,
}

/// The box the optimizer searches over.
///
/// JSON shape: `{"dims": [{"name": "s_time_mask", "low": 1, "high": 200,
/// "scale": "log"}, …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SearchSpaceRaw", into = "SearchSpaceRaw")]
pub struct SearchSpace {
    dims: Vec<DimSpec>,
}

#[derive(Serialize, Deserialize)]
struct SearchSpaceRaw {
    dims: Vec<DimSpec>,
}

impl TryFrom<SearchSpaceRaw> for SearchSpace {
    type Error = Error;

    fn try_from(raw: SearchSpaceRaw) -> Result<Self> {
        SearchSpace::new(raw.dims)
    }
}

impl From<SearchSpace> for SearchSpaceRaw {
    fn from(space: SearchSpace) -> Self {
        SearchSpaceRaw { dims: space.dims }
    }
}

impl SearchSpace {
    pub fn new(dims: Vec<DimSpec>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::input("search space needs at least one dimension"));
        }
        let mut seen = std::collections::HashSet::new();
        for dim in &dims {
            if dim.name.is_empty() {
                return Err(Error::input("dimension names must be non-empty"));
            }
            if !seen.insert(dim.name.clone()) {
                return Err(Error::input(format!("duplicate dimension name {:?}", dim.name)));
            }
            if !dim.low.is_finite() || !dim.high.is_finite() || dim.low >= dim.high {
                return Err(Error::input(format!(
                    "dimension {:?} needs finite low < high, got [{}, {}]",
                    dim.name, dim.low, dim.high
                )));
            }
            if dim.scale == Scale::Log && dim.low <= 0.0 {
                return Err(Error::input(format!(
                    "log-scale dimension {:?} must be strictly positive",
                    dim.name
                )));
            }
        }
        Ok(SearchSpace { dims })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path.as_ref())?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dims(&self) -> &[DimSpec] {
        &self.dims
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dims.iter().position(|d| d.name == name)
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        point.len() == self.dims.len()
            && point
                .iter()
                .zip(&self.dims)
                .all(|(v, d)| v.is_finite() && *v >= d.low && *v <= d.high)
    }

    /// Natural → unit-cube coordinates; errors on out-of-bounds points.
    pub fn to_unit(&self, point: &[f64]) -> Result<Vec<f64>> {
        if !self.contains(point) {
            return Err(Error::input(format!(
                "point {point:?} lies outside the search space"
            )));
        }
        Ok(self.to_unit_clamped(point))
    }

    /// Natural → unit-cube coordinates, clamping instead of failing.
    pub fn to_unit_clamped(&self, point: &[f64]) -> Vec<f64> {
        point
            .iter()
            .zip(&self.dims)
            .map(|(&v, d)| {
                let v = v.clamp(d.low, d.high);
                let u = match d.scale {
                    Scale::Linear => (v - d.low) / (d.high - d.low),
                    Scale::Log => (v.ln() - d.low.ln()) / (d.high.ln() - d.low.ln()),
                };
                u.clamp(0.0, 1.0)
            })
            .collect()
    }

    /// Unit-cube → natural coordinates (input clamped into [0, 1]).
    pub fn from_unit(&self, unit: &[f64]) -> Vec<f64> {
        unit.iter()
            .zip(&self.dims)
            .map(|(&u, d)| {
                let u = u.clamp(0.0, 1.0);
                let v = match d.scale {
                    Scale::Linear => d.low + u * (d.high - d.low),
                    Scale::Log => (d.low.ln() + u * (d.high.ln() - d.low.ln())).exp(),
                };
                v.clamp(d.low, d.high)
            })
            .collect()
    }

    /// Point as a name → value map (for logs).
    pub fn point_map(&self, point: &[f64]) -> BTreeMap<String, f64> {
        self.dims
            .iter()
            .zip(point)
            .map(|(d, &v)| (d.name.clone(), v))
            .collect()
    }

    /// Point from a name → value map; every dimension must be present.
    pub fn point_from_map(&self, map: &BTreeMap<String, f64>) -> Result<Vec<f64>> {
        if map.len() != self.dims.len() {
            return Err(Error::input(format!(
                "point has {} entries, space has {} dimensions",
                map.len(),
                self.dims.len()
            )));
        }
        self.dims
            .iter()
            .map(|d| {
                map.get(&d.name)
                    .copied()
                    .ok_or_else(|| Error::input(format!("point is missing dimension {:?}", d.name)))
            })
            .collect()
    }
}
