//! Per-mini-batch orchestration: rank losses, evaluate λ per sample and
//! augmentation, draw selections and partners, then apply everything in a
//! fixed domain order.
//!
//! Planning and application are split so a plan can be audited and replayed:
//! [`plan_batch`] is a pure function of the batch losses, the policy set and
//! one seed, and [`apply_plan`] consumes the plan without further policy
//! decisions. Randomness is keyed per (seed, sample id, kind), never by
//! batch position, so permuting a batch permutes the outputs and nothing
//! else.
//!
//! Application order per sample: sample pairing, cutmix (both on the raw
//! waveform), featurize, then time stretch, time masking, frequency masking
//! on the feature matrix. Labels are never touched.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{
    cutmix, freq_mask, map_lambda, sample_pairing, time_mask, time_stretch, AugmentationKind,
    AugmentationStrength, FeatureMatrix, Featurizer, FeaturizerConfig, Waveform,
    DEFAULT_NUM_CUT_SEGMENTS, DEFAULT_NUM_MASKS,
};
use crate::error::{Error, Result};
use crate::policy::{lambdas_for_batch, rank_losses, sample_selection, PolicySet};
use crate::seeding::{derive_seed, stream};

// stream roles under one (seed, sample, kind) key
const ROLE_SELECT: u64 = 0;
const ROLE_PARTNER: u64 = 1;
const ROLE_APPLY: u64 = 2;

/// One training sample as the planner sees it.
#[derive(Debug, Clone)]
pub struct BatchSample {
    /// Unique id within the batch; seeds this sample's random streams.
    pub id: u64,
    pub waveform: Waveform,
    /// Class id; carried through untouched.
    pub label: usize,
    /// Per-sample loss of the current model on the clean sample.
    pub clean_loss: f64,
}

/// Policy configuration file: the five policies plus the application
/// constants and the seed of the generator hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub policies: PolicySet,
    #[serde(default = "default_num_masks")]
    pub num_masks: usize,
    #[serde(default = "default_num_cut_segments")]
    pub n_cm: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_num_masks() -> usize {
    DEFAULT_NUM_MASKS
}

fn default_num_cut_segments() -> usize {
    DEFAULT_NUM_CUT_SEGMENTS
}

impl PolicyConfig {
    pub fn new(policies: PolicySet) -> Self {
        PolicyConfig {
            policies,
            num_masks: DEFAULT_NUM_MASKS,
            n_cm: DEFAULT_NUM_CUT_SEGMENTS,
            seed: 0,
        }
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

    pub fn apply_config(&self) -> ApplyConfig {
        ApplyConfig {
            featurizer: FeaturizerConfig::default(),
            num_masks: self.num_masks,
            n_cm: self.n_cm,
        }
    }
}

/// Application-time constants for [`apply_plan`].
#[derive(Debug, Clone, Copy)]
pub struct ApplyConfig {
    pub featurizer: FeaturizerConfig,
    pub num_masks: usize,
    pub n_cm: usize,
}

impl Default for ApplyConfig {
    fn default() -> Self {
        ApplyConfig {
            featurizer: FeaturizerConfig::default(),
            num_masks: DEFAULT_NUM_MASKS,
            n_cm: DEFAULT_NUM_CUT_SEGMENTS,
        }
    }
}

/// Planned decisions for one sample and one augmentation kind.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanEntry {
    pub selected: bool,
    pub lambda: f64,
    pub strength: AugmentationStrength,
    /// Partner sample id for the raw-domain mixing transforms; `None` for
    /// feature-domain kinds and for singleton batches.
    pub partner: Option<u64>,
    /// Seed of the generator consumed when this entry is applied.
    pub apply_seed: u64,
}

/// All planned decisions for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePlan {
    pub sample_id: u64,
    /// 1-based loss rank within the batch (1 = lowest loss).
    pub rank: usize,
    entries: [PlanEntry; AugmentationKind::COUNT],
}

impl SamplePlan {
    pub fn entry(&self, kind: AugmentationKind) -> &PlanEntry {
        &self.entries[kind.index()]
    }

    /// Does any selected entry touch the raw waveform?
    pub fn uses_raw_domain(&self) -> bool {
        AugmentationKind::ALL
            .iter()
            .any(|k| k.is_raw_domain() && self.entry(*k).selected)
    }
}

/// The materialized augmentation decisions for one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentationPlan {
    seed: u64,
    samples: Vec<SamplePlan>,
}

impl AugmentationPlan {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn batch_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[SamplePlan] {
        &self.samples
    }
}

/// Plans a batch: ranks the clean losses, evaluates λ per sample and kind,
/// draws selections and mixing partners. Pure in (losses, policies, seed).
pub fn plan_batch(batch: &[BatchSample], policies: &PolicySet, seed: u64) -> Result<AugmentationPlan> {
    if batch.is_empty() {
        return Err(Error::input("cannot plan an empty batch"));
    }
    let mut seen = HashSet::new();
    for sample in batch {
        if !seen.insert(sample.id) {
            return Err(Error::input(format!("duplicate sample id {} in batch", sample.id)));
        }
    }

    let losses: Vec<f64> = batch.iter().map(|s| s.clean_loss).collect();
    let ranking = rank_losses(&losses)?;

    // per-kind λ for every sample, in batch order
    let mut lambdas = Vec::with_capacity(AugmentationKind::COUNT);
    for kind in AugmentationKind::ALL {
        lambdas.push(lambdas_for_batch(policies.get(kind), &ranking)?);
    }

    let sorted_ids: Vec<u64> = {
        let mut ids: Vec<u64> = batch.iter().map(|s| s.id).collect();
        ids.sort_unstable();
        ids
    };

    let mut samples = Vec::with_capacity(batch.len());
    for (i, sample) in batch.iter().enumerate() {
        let entries = AugmentationKind::ALL.map(|kind| {
            let lambda = lambdas[kind.index()][i];
            let strength = map_lambda(kind, lambda).expect("lambda in [0,1] by construction");
            let mut select_rng = stream(seed, &[sample.id, kind.index() as u64, ROLE_SELECT]);
            let selected = sample_selection(policies.get(kind), &mut select_rng);
            let partner = if kind.is_raw_domain() && batch.len() > 1 {
                let mut partner_rng = stream(seed, &[sample.id, kind.index() as u64, ROLE_PARTNER]);
                let candidates: Vec<u64> =
                    sorted_ids.iter().copied().filter(|&id| id != sample.id).collect();
                Some(candidates[partner_rng.random_range(0..candidates.len())])
            } else {
                None
            };
            PlanEntry {
                selected,
                lambda,
                strength,
                partner,
                apply_seed: derive_seed(seed, &[sample.id, kind.index() as u64, ROLE_APPLY]),
            }
        });
        samples.push(SamplePlan { sample_id: sample.id, rank: ranking.rank_of(i), entries });
    }
    Ok(AugmentationPlan { seed, samples })
}

/// Applies a plan to its batch, returning one feature matrix per sample in
/// batch order. Samples are processed in parallel; outputs are gathered by
/// position.
pub fn apply_plan(
    batch: &[BatchSample],
    plan: &AugmentationPlan,
    config: &ApplyConfig,
) -> Result<Vec<FeatureMatrix>> {
    apply_plan_cached(batch, plan, config, None)
}

/// [`apply_plan`] with precomputed clean featurizations. When a sample's
/// plan selects no raw-domain transform, its cached clean features replace
/// the featurize step (the results are identical because featurization is
/// deterministic).
pub fn apply_plan_cached(
    batch: &[BatchSample],
    plan: &AugmentationPlan,
    config: &ApplyConfig,
    clean_features: Option<&[&FeatureMatrix]>,
) -> Result<Vec<FeatureMatrix>> {
    if batch.len() != plan.batch_size() {
        return Err(Error::input(format!(
            "plan covers {} samples, batch has {}",
            plan.batch_size(),
            batch.len()
        )));
    }
    for (sample, planned) in batch.iter().zip(plan.samples()) {
        if sample.id != planned.sample_id {
            return Err(Error::input(format!(
                "plan/batch mismatch: sample id {} where plan expects {}",
                sample.id, planned.sample_id
            )));
        }
    }
    if let Some(cache) = clean_features {
        if cache.len() != batch.len() {
            return Err(Error::input("clean-feature cache length does not match batch"));
        }
    }
    let rate = batch[0].waveform.sample_rate();
    if let Some(bad) = batch.iter().find(|s| s.waveform.sample_rate() != rate) {
        return Err(Error::input(format!(
            "mixed sample rates in batch: {} vs {}",
            rate,
            bad.waveform.sample_rate()
        )));
    }

    let featurizer = Featurizer::new(config.featurizer, rate)?;
    let by_id: HashMap<u64, &Waveform> = batch.iter().map(|s| (s.id, &s.waveform)).collect();

    batch
        .par_iter()
        .zip(plan.samples().par_iter())
        .enumerate()
        .map(|(i, (sample, planned))| {
            apply_one(sample, planned, config, &featurizer, &by_id, clean_features.map(|c| c[i]))
        })
        .collect()
}

fn apply_one(
    sample: &BatchSample,
    plan: &SamplePlan,
    config: &ApplyConfig,
    featurizer: &Featurizer,
    by_id: &HashMap<u64, &Waveform>,
    clean: Option<&FeatureMatrix>,
) -> Result<FeatureMatrix> {
    let mut wave: Option<Waveform> = None;

    let pairing = plan.entry(AugmentationKind::SamplePairing);
    if pairing.selected {
        if let (Some(partner_id), AugmentationStrength::SamplePairing { weight }) =
            (pairing.partner, pairing.strength)
        {
            let partner = by_id
                .get(&partner_id)
                .ok_or_else(|| Error::input(format!("partner id {partner_id} not in batch")))?;
            wave = Some(sample_pairing(&sample.waveform, partner, weight)?);
        }
    }

    let cut = plan.entry(AugmentationKind::CutMix);
    if cut.selected {
        if let (Some(partner_id), AugmentationStrength::CutMix { width }) =
            (cut.partner, cut.strength)
        {
            let partner = by_id
                .get(&partner_id)
                .ok_or_else(|| Error::input(format!("partner id {partner_id} not in batch")))?;
            let mut rng = stream(cut.apply_seed, &[]);
            let base = wave.as_ref().unwrap_or(&sample.waveform);
            wave = Some(cutmix(base, partner, width, config.n_cm, &mut rng)?);
        }
    }

    let mut feat = match (&wave, clean) {
        (None, Some(cached)) => cached.clone(),
        (Some(w), _) => featurizer.featurize(w)?,
        (None, None) => featurizer.featurize(&sample.waveform)?,
    };

    let stretch = plan.entry(AugmentationKind::TimeStretch);
    if stretch.selected {
        if let AugmentationStrength::TimeStretch { max_ratio } = stretch.strength {
            let mut rng = stream(stretch.apply_seed, &[]);
            feat = time_stretch(&feat, max_ratio, &mut rng)?;
        }
    }

    let tm = plan.entry(AugmentationKind::TimeMask);
    if tm.selected {
        if let AugmentationStrength::TimeMask { frames } = tm.strength {
            let mut rng = stream(tm.apply_seed, &[]);
            feat = time_mask(&feat, frames, config.num_masks, &mut rng)?;
        }
    }

    let fm = plan.entry(AugmentationKind::FreqMask);
    if fm.selected {
        if let AugmentationStrength::FreqMask { bins } = fm.strength {
            let mut rng = stream(fm.apply_seed, &[]);
            feat = freq_mask(&feat, bins, config.num_masks, &mut rng)?;
        }
    }

    Ok(feat)
}
