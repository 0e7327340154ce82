//! JSON-lines trial log: one object per suggest/observe event.
//!
//! The log alone reconstructs a search history, so a crashed run can resume
//! from its log file. Writes rewrite the whole file atomically.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::space::SearchSpace;
use super::Trial;
use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Suggest,
    Observe,
}

/// One logged event. Suggest events carry the point, observe events the
/// objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEvent {
    pub event: EventKind,
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    pub timestamp: f64,
}

impl TrialEvent {
    pub fn suggest(trial: &Trial, space: &SearchSpace, timestamp: f64) -> Self {
        TrialEvent {
            event: EventKind::Suggest,
            id: trial.id,
            point: Some(space.point_map(&trial.point)),
            objective: None,
            timestamp,
        }
    }

    pub fn observe(id: u64, objective: f64, timestamp: f64) -> Self {
        TrialEvent { event: EventKind::Observe, id, point: None, objective: Some(objective), timestamp }
    }

    pub fn now() -> f64 {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0)
    }
}

pub fn encode_events(events: &[TrialEvent]) -> Result<String> {
    let mut out = String::new();
    for event in events {
        out.push_str(&serde_json::to_string(event)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn decode_events(text: &str) -> Result<Vec<TrialEvent>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

/// File-backed event log.
pub struct TrialLog {
    path: PathBuf,
    events: Vec<TrialEvent>,
}

impl TrialLog {
    /// Opens a log, loading any events already on disk.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let events = if path.exists() {
            decode_events(&std::fs::read_to_string(&path)?)?
        } else {
            Vec::new()
        };
        Ok(TrialLog { path, events })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn events(&self) -> &[TrialEvent] {
        &self.events
    }

    pub fn append(&mut self, event: TrialEvent) -> Result<()> {
        self.events.push(event);
        self.flush()
    }

    pub fn append_all(&mut self, events: impl IntoIterator<Item = TrialEvent>) -> Result<()> {
        self.events.extend(events);
        self.flush()
    }

    fn flush(&self) -> Result<()> {
        write_atomic(&self.path, encode_events(&self.events)?.as_bytes())
    }
}
