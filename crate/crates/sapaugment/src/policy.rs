//! Sample-adaptive augmentation policy.
//!
//! A policy maps a sample's loss *ranking* inside its mini-batch (not the raw
//! loss, which drifts over the course of training) to an augmentation
//! strength λ ∈ [0, 1] through the regularized incomplete beta function:
//!
//! λ = 1 − I(s·a, s·(1−a); l_rank / B)
//!
//! Rank 1 is the lowest-loss (easiest) sample and receives the strongest
//! augmentation; the hardest sample (rank B) gets λ = 0. The shape scale `s`
//! steepens the curve toward a step function, and the location `a` shifts it:
//! larger `a` yields larger λ at every rank. With shapes (s·a, s·(1−a)) the
//! underlying Beta distribution has mean `a`, which is what makes the
//! a-monotonicity hold under the standard CDF convention.
//!
//! Each policy additionally carries a selection probability `p`: the policy
//! is applied to a sample at all only with probability `p`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::augment::AugmentationKind;
use crate::betafn::{inc_beta, BetaArgs};
use crate::error::{Error, Result};

/// Hyper-parameters of one augmentation policy: shape scale `s`, shape
/// location `a`, selection probability `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicyParamsRaw", into = "PolicyParamsRaw")]
pub struct PolicyParams {
    s: f64,
    a: f64,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct PolicyParamsRaw {
    s: f64,
    a: f64,
    p: f64,
}

impl TryFrom<PolicyParamsRaw> for PolicyParams {
    type Error = Error;

    fn try_from(raw: PolicyParamsRaw) -> Result<Self> {
        PolicyParams::new(raw.s, raw.a, raw.p)
    }
}

impl From<PolicyParams> for PolicyParamsRaw {
    fn from(p: PolicyParams) -> Self {
        PolicyParamsRaw { s: p.s, a: p.a, p: p.p }
    }
}

impl PolicyParams {
    /// Requires s > 0, 0 < a < 1 and 0 ≤ p ≤ 1, so that both beta shapes
    /// s·a and s·(1−a) stay strictly positive.
    pub fn new(s: f64, a: f64, p: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::input(format!("policy scale s must be > 0, got {s}")));
        }
        if !a.is_finite() || a <= 0.0 || a >= 1.0 {
            return Err(Error::input(format!("policy location a must lie in (0, 1), got {a}")));
        }
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::input(format!("selection probability must lie in [0, 1], got {p}")));
        }
        Ok(PolicyParams { s, a, p })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Params that never select and, if forced, apply zero-strength at the
    /// hardest rank; used as the no-augmentation baseline.
    pub fn disabled() -> Self {
        PolicyParams { s: 2.0, a: 0.5, p: 0.0 }
    }
}

/// Ascending, stable ranking of per-sample losses within one mini-batch.
///
/// `ranks[i]` is the 1-based rank of sample `i`; rank 1 is the smallest loss,
/// ties keep original batch order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LossRanking {
    ranks: Vec<usize>,
}

impl LossRanking {
    pub fn batch_size(&self) -> usize {
        self.ranks.len()
    }

    /// 1-based rank of sample `i`.
    pub fn rank_of(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
}

/// Ranks a batch of losses ascending (rank 1 = smallest loss), breaking ties
/// by original batch index.
pub fn rank_losses(losses: &[f64]) -> Result<LossRanking> {
    if losses.is_empty() {
        return Err(Error::input("cannot rank an empty batch"));
    }
    if let Some(bad) = losses.iter().find(|l| !l.is_finite()) {
        return Err(Error::input(format!("losses must be finite, got {bad}")));
    }
    let mut order: Vec<usize> = (0..losses.len()).collect();
    order.sort_by(|&i, &j| losses[i].total_cmp(&losses[j]).then(i.cmp(&j)));
    let mut ranks = vec![0usize; losses.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    Ok(LossRanking { ranks })
}

/// Augmentation strength for rank `l_rank` of a batch of size `batch_size`:
/// λ = 1 − I(s·a, s·(1−a); l_rank / B).
pub fn lambda_of_rank(params: &PolicyParams, l_rank: usize, batch_size: usize) -> Result<f64> {
    if batch_size == 0 || l_rank == 0 || l_rank > batch_size {
        return Err(Error::input(format!(
            "rank {l_rank} out of range for batch size {batch_size}"
        )));
    }
    let x = l_rank as f64 / batch_size as f64;
    let args = BetaArgs::new(params.s * params.a, params.s * (1.0 - params.a), x)?;
    Ok(1.0 - inc_beta(args)?)
}

/// λ for every sample of a ranked batch, in batch order.
pub fn lambdas_for_batch(params: &PolicyParams, ranking: &LossRanking) -> Result<Vec<f64>> {
    let batch = ranking.batch_size();
    ranking
        .ranks()
        .iter()
        .map(|&r| lambda_of_rank(params, r, batch))
        .collect()
}

/// Bernoulli draw: apply this policy to the sample at all?
pub fn sample_selection<R: Rng + ?Sized>(params: &PolicyParams, rng: &mut R) -> bool {
    rng.random::<f64>() < params.p
}

/// One [`PolicyParams`] per augmentation kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolicySetRepr", into = "PolicySetRepr")]
pub struct PolicySet {
    params: [PolicyParams; AugmentationKind::COUNT],
}

impl PolicySet {
    pub fn new(params: impl Fn(AugmentationKind) -> PolicyParams) -> Self {
        PolicySet { params: AugmentationKind::ALL.map(&params) }
    }

    /// Same params for all five kinds.
    pub fn uniform(params: PolicyParams) -> Self {
        PolicySet::new(|_| params)
    }

    /// All selection probabilities zero: the identity pipeline.
    pub fn disabled() -> Self {
        PolicySet::uniform(PolicyParams::disabled())
    }

    pub fn get(&self, kind: AugmentationKind) -> &PolicyParams {
        &self.params[kind.index()]
    }

    pub fn set(&mut self, kind: AugmentationKind, params: PolicyParams) {
        self.params[kind.index()] = params;
    }

    pub fn iter(&self) -> impl Iterator<Item = (AugmentationKind, &PolicyParams)> {
        AugmentationKind::ALL.iter().map(move |&k| (k, self.get(k)))
    }
}

/// JSON shape: one named entry per augmentation kind.
#[derive(Serialize, Deserialize)]
struct PolicySetRepr {
    time_mask: PolicyParams,
    freq_mask: PolicyParams,
    time_stretch: PolicyParams,
    sample_pairing: PolicyParams,
    cutmix: PolicyParams,
}

impl TryFrom<PolicySetRepr> for PolicySet {
    type Error = Error;

    fn try_from(repr: PolicySetRepr) -> Result<Self> {
        Ok(PolicySet::new(|kind| match kind {
            AugmentationKind::TimeMask => repr.time_mask,
            AugmentationKind::FreqMask => repr.freq_mask,
            AugmentationKind::TimeStretch => repr.time_stretch,
            AugmentationKind::SamplePairing => repr.sample_pairing,
            AugmentationKind::CutMix => repr.cutmix,
        }))
    }
}

impl From<PolicySet> for PolicySetRepr {
    fn from(set: PolicySet) -> Self {
        PolicySetRepr {
            time_mask: *set.get(AugmentationKind::TimeMask),
            freq_mask: *set.get(AugmentationKind::FreqMask),
            time_stretch: *set.get(AugmentationKind::TimeStretch),
            sample_pairing: *set.get(AugmentationKind::SamplePairing),
            cutmix: *set.get(AugmentationKind::CutMix),
        }
    }
}
