//! Desk-scale meta-learning loop: a synthetic audio classification task
//! whose validation accuracy serves as the policy-search objective.
//!
//! The task is deliberately small — four tone/chirp classes, one-second
//! clips, a multinomial logistic regression over time-averaged log-mel
//! features — so that a full training run takes a fraction of a second and
//! the outer Bayesian-optimization loop stays interactive. Each training
//! step ranks the mini-batch by clean per-sample loss, plans augmentations
//! with the candidate policies, and takes a gradient step on the augmented
//! features.

mod dataset;
mod model;

pub use dataset::{class_template_hz, generate_dataset, DatasetConfig, LabeledWave, SyntheticDataset};
pub use model::TinyModel;

use rayon::prelude::*;

use crate::augment::{AugmentationKind, FeatureMatrix, Featurizer, FeaturizerConfig};
use crate::error::{Error, Result};
use crate::pipeline::{apply_plan_cached, plan_batch, ApplyConfig, BatchSample};
use crate::policy::{PolicyParams, PolicySet};
use crate::search::{DimSpec, Scale, SearchSpace};
use crate::seeding::{derive_seed, stream};

/// Training-loop settings for one run.
#[derive(Debug, Clone, Copy)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 5, batch_size: 32, learning_rate: 0.5 }
    }
}

/// Result of one training run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOutcome {
    /// Final validation accuracy; 0 when the run diverged.
    pub accuracy: f64,
    pub diverged: bool,
}

/// A dataset with its clean featurizations precomputed. The clean features
/// never depend on the policy or the training seed, so preparing once and
/// training many times is exactly equivalent to recomputing them per run.
pub struct PreparedDataset {
    dataset: SyntheticDataset,
    clean_train: Vec<FeatureMatrix>,
    train_avg: Vec<Vec<f64>>,
    val_avg: Vec<Vec<f64>>,
    feat_mean: Vec<f64>,
    feat_scale: Vec<f64>,
}

impl PreparedDataset {
    pub fn new(dataset: SyntheticDataset) -> Result<Self> {
        let featurizer =
            Featurizer::new(FeaturizerConfig::default(), dataset.config.sample_rate)?;
        let clean_train: Vec<FeatureMatrix> = dataset
            .train
            .par_iter()
            .map(|s| featurizer.featurize(&s.waveform))
            .collect::<Result<_>>()?;
        let train_avg: Vec<Vec<f64>> = clean_train.par_iter().map(clip_features).collect();
        let val_avg: Vec<Vec<f64>> = dataset
            .val
            .par_iter()
            .map(|s| Ok(clip_features(&featurizer.featurize(&s.waveform)?)))
            .collect::<Result<_>>()?;
        let (feat_mean, feat_scale) =
            standardization(&train_avg, featurizer.config().num_mel_bins);
        Ok(PreparedDataset { dataset, clean_train, train_avg, val_avg, feat_mean, feat_scale })
    }

    pub fn dataset(&self) -> &SyntheticDataset {
        &self.dataset
    }

    /// Trains under the candidate policies and returns validation accuracy.
    /// Fully deterministic given `(dataset, policies, seed)`; divergence
    /// maps to accuracy 0 with the flag set instead of an error.
    pub fn train_and_evaluate(
        &self,
        policies: &PolicySet,
        train: &TrainConfig,
        seed: u64,
    ) -> Result<TrainOutcome> {
        if train.epochs == 0 || train.batch_size == 0 {
            return Err(Error::input("epochs and batch size must be positive"));
        }
        if !train.learning_rate.is_finite() || train.learning_rate <= 0.0 {
            return Err(Error::input("learning rate must be positive and finite"));
        }

        let dataset = &self.dataset;
        let apply_config = ApplyConfig::default();
        let mut model = TinyModel::new(
            self.feat_mean.len(),
            dataset.config.num_classes,
            self.feat_mean.clone(),
            self.feat_scale.clone(),
        );

        // Polyak tail average over the final epoch's iterates; evaluating
        // the averaged parameters removes most of the endpoint's
        // shuffle-order jitter.
        let mut tail_w: Vec<f64> = Vec::new();
        let mut tail_b: Vec<f64> = Vec::new();
        let mut tail_count = 0usize;

        let n = dataset.train.len();
        for epoch in 0..train.epochs {
            let mut order: Vec<usize> = (0..n).collect();
            let mut shuffle_rng = stream(seed, &[0x5f1e, epoch as u64]);
            shuffle(&mut order, &mut shuffle_rng);

            for (step, chunk) in order.chunks(train.batch_size).enumerate() {
                // clean forward pass for per-sample losses under the
                // current model
                let batch: Vec<BatchSample> = chunk
                    .iter()
                    .map(|&i| {
                        let loss = model.loss(&self.train_avg[i], dataset.train[i].label);
                        BatchSample {
                            id: i as u64,
                            waveform: dataset.train[i].waveform.clone(),
                            label: dataset.train[i].label,
                            clean_loss: loss,
                        }
                    })
                    .collect();
                if batch.iter().any(|s| !s.clean_loss.is_finite()) {
                    return Ok(TrainOutcome { accuracy: 0.0, diverged: true });
                }

                let plan_seed = derive_seed(seed, &[0x9a7e, epoch as u64, step as u64]);
                let plan = plan_batch(&batch, policies, plan_seed)?;
                let cache: Vec<&FeatureMatrix> =
                    chunk.iter().map(|&i| &self.clean_train[i]).collect();
                let augmented = apply_plan_cached(&batch, &plan, &apply_config, Some(&cache))?;

                let step_data: Vec<(Vec<f64>, usize)> = augmented
                    .iter()
                    .zip(&batch)
                    .map(|(feat, sample)| (clip_features(feat), sample.label))
                    .collect();
                let mean_loss = model.sgd_step(&step_data, train.learning_rate);
                if !mean_loss.is_finite() {
                    return Ok(TrainOutcome { accuracy: 0.0, diverged: true });
                }

                if epoch + 1 == train.epochs {
                    let (w, b) = model.parameters();
                    if tail_count == 0 {
                        tail_w = w.to_vec();
                        tail_b = b.to_vec();
                    } else {
                        tail_w.iter_mut().zip(w).for_each(|(acc, v)| *acc += v);
                        tail_b.iter_mut().zip(b).for_each(|(acc, v)| *acc += v);
                    }
                    tail_count += 1;
                }
            }
        }

        if tail_count > 1 {
            let inv = 1.0 / tail_count as f64;
            tail_w.iter_mut().for_each(|v| *v *= inv);
            tail_b.iter_mut().for_each(|v| *v *= inv);
        }
        model.set_parameters(tail_w, tail_b);

        let correct = dataset
            .val
            .iter()
            .zip(&self.val_avg)
            .filter(|(s, avg)| model.predict(avg) == s.label)
            .count();
        Ok(TrainOutcome { accuracy: correct as f64 / dataset.val.len() as f64, diverged: false })
    }
}

/// One-off variant of [`PreparedDataset::train_and_evaluate`].
pub fn train_and_evaluate(
    dataset: &SyntheticDataset,
    policies: &PolicySet,
    train: &TrainConfig,
    seed: u64,
) -> Result<TrainOutcome> {
    PreparedDataset::new(dataset.clone())?.train_and_evaluate(policies, train, seed)
}

/// Model input for one clip: time-averaged log-mel, centered per clip so a
/// broadband level change (e.g. a different noise floor) cancels out.
fn clip_features(feat: &FeatureMatrix) -> Vec<f64> {
    let mut avg = feat.per_bin_mean();
    let mean = avg.iter().sum::<f64>() / avg.len() as f64;
    avg.iter_mut().for_each(|v| *v -= mean);
    avg
}

fn standardization(rows: &[Vec<f64>], dims: usize) -> (Vec<f64>, Vec<f64>) {
    let n = rows.len() as f64;
    let mut mean = vec![0.0; dims];
    for row in rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dims];
    for row in rows {
        for ((v, m), out) in row.iter().zip(&mean).zip(var.iter_mut()) {
            *out += (v - m) * (v - m);
        }
    }
    let scale = var.iter().map(|v| (v / n).sqrt().max(1e-6)).collect();
    (mean, scale)
}

fn shuffle<R: rand::Rng + ?Sized>(order: &mut [usize], rng: &mut R) {
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
}

/// The canonical 15-dimensional policy search space:
/// `[s_1, a_1, …, s_5, a_5, p_1, …, p_5]` in the canonical kind order, with
/// `s` searched on a log scale over [1, 200], `a` over [0.05, 0.95] and `p`
/// over [0, 1].
pub fn policy_search_space() -> SearchSpace {
    let mut dims = Vec::with_capacity(3 * AugmentationKind::COUNT);
    for kind in AugmentationKind::ALL {
        dims.push(DimSpec {
            name: format!("s_{}", kind.name()),
            low: 1.0,
            high: 200.0,
            scale: Scale::Log,
        });
        dims.push(DimSpec {
            name: format!("a_{}", kind.name()),
            low: 0.05,
            high: 0.95,
            scale: Scale::Linear,
        });
    }
    for kind in AugmentationKind::ALL {
        dims.push(DimSpec {
            name: format!("p_{}", kind.name()),
            low: 0.0,
            high: 1.0,
            scale: Scale::Linear,
        });
    }
    SearchSpace::new(dims).expect("canonical space is valid")
}

/// Decodes a search-space point into the five policies. The space must carry
/// the canonical dimension names (any order).
pub fn decode_policy_vector(space: &SearchSpace, point: &[f64]) -> Result<PolicySet> {
    if !space.contains(point) {
        return Err(Error::input("point lies outside the search space"));
    }
    let lookup = |name: &str| -> Result<f64> {
        space
            .index_of(name)
            .map(|i| point[i])
            .ok_or_else(|| Error::input(format!("search space is missing dimension {name:?}")))
    };
    let mut set = PolicySet::disabled();
    for kind in AugmentationKind::ALL {
        let s = lookup(&format!("s_{}", kind.name()))?;
        let a = lookup(&format!("a_{}", kind.name()))?;
        let p = lookup(&format!("p_{}", kind.name()))?;
        set.set(kind, PolicyParams::new(s, a, p)?);
    }
    Ok(set)
}

/// Inverse of [`decode_policy_vector`].
pub fn encode_policy_set(space: &SearchSpace, set: &PolicySet) -> Result<Vec<f64>> {
    let mut point = vec![0.0; space.len()];
    let mut filled = vec![false; space.len()];
    for kind in AugmentationKind::ALL {
        let params = set.get(kind);
        for (suffix, value) in [("s", params.s()), ("a", params.a()), ("p", params.p())] {
            let name = format!("{suffix}_{}", kind.name());
            let idx = space
                .index_of(&name)
                .ok_or_else(|| Error::input(format!("search space is missing dimension {name:?}")))?;
            point[idx] = value;
            filled[idx] = true;
        }
    }
    if !filled.iter().all(|&f| f) {
        return Err(Error::input("search space has dimensions beyond the policy parameters"));
    }
    Ok(point)
}

/// Search objective: median validation accuracy of a policy vector across
/// the evaluation seeds, on a fixed dataset.
pub struct Objective {
    prepared: PreparedDataset,
    space: SearchSpace,
    train: TrainConfig,
    eval_seeds: Vec<u64>,
}

impl Objective {
    pub fn new(dataset: SyntheticDataset, train: TrainConfig, eval_seeds: Vec<u64>) -> Result<Self> {
        if eval_seeds.is_empty() {
            return Err(Error::input("need at least one evaluation seed"));
        }
        Ok(Objective {
            prepared: PreparedDataset::new(dataset)?,
            space: policy_search_space(),
            train,
            eval_seeds,
        })
    }

    /// Default protocol: dataset from `seed`, three evaluation seeds.
    pub fn with_default_protocol(seed: u64) -> Result<Self> {
        let dataset = generate_dataset(&DatasetConfig::default(), seed)?;
        let eval_seeds = (1..=3).map(|i| derive_seed(seed, &[0xe7a1, i])).collect();
        Objective::new(dataset, TrainConfig::default(), eval_seeds)
    }

    /// Replaces the canonical space with a caller-provided one (e.g. with
    /// narrowed bounds). The space must carry exactly the canonical
    /// dimension names.
    pub fn with_space(mut self, space: SearchSpace) -> Result<Self> {
        encode_policy_set(&space, &PolicySet::disabled())?;
        self.space = space;
        Ok(self)
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn dataset(&self) -> &SyntheticDataset {
        self.prepared.dataset()
    }

    pub fn train_config(&self) -> &TrainConfig {
        &self.train
    }

    /// Median accuracy of the decoded policy across the evaluation seeds.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        let policies = decode_policy_vector(&self.space, point)?;
        self.evaluate_policies(&policies)
    }

    /// Same protocol with explicit policies (used for baselines).
    pub fn evaluate_policies(&self, policies: &PolicySet) -> Result<f64> {
        self.evaluate_policies_with_seeds(policies, &self.eval_seeds)
    }

    /// Median accuracy across an explicit seed list (e.g. a wider final
    /// evaluation than the search-time protocol).
    pub fn evaluate_policies_with_seeds(
        &self,
        policies: &PolicySet,
        seeds: &[u64],
    ) -> Result<f64> {
        if seeds.is_empty() {
            return Err(Error::input("need at least one evaluation seed"));
        }
        let outcomes: Vec<TrainOutcome> = seeds
            .par_iter()
            .map(|&s| self.prepared.train_and_evaluate(policies, &self.train, s))
            .collect::<Result<_>>()?;
        Ok(median(outcomes.iter().map(|o| o.accuracy)))
    }

    /// Median accuracy with all policies disabled.
    pub fn baseline(&self) -> Result<f64> {
        self.evaluate_policies(&PolicySet::disabled())
    }
}

fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
