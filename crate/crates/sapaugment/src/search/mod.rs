//! Policy search: Gaussian-process Bayesian optimization with constant-liar
//! parallel suggestion.
//!
//! The optimizer maximizes a black-box objective over a box-bounded space
//! (log-scaled dimensions are handled in transformed coordinates). Until
//! `n_init` trials have completed it proposes scrambled low-discrepancy
//! points; afterwards each suggestion maximizes expected improvement under a
//! GP surrogate. Batches of q > 1 points are produced with the constant-liar
//! scheme: after each maximizer, a temporary observation at the lie value
//! (the best objective seen, for CL-max) is added and the posterior is
//! re-conditioned before the next maximization. Pending trials that have not
//! reported back yet are treated as lies the same way, so suggestion and
//! evaluation can overlap freely.

mod gp;
mod halton;
mod log;
mod space;

pub use gp::{GpConfig, GpHyperparams, GpModel};
pub use log::{decode_events, encode_events, EventKind, TrialEvent, TrialLog};
pub use space::{DimSpec, Scale, SearchSpace};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use halton::ScrambledHalton;

/// Lifecycle of one evaluated point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Suggested,
    Running,
    Completed,
}

/// One point of the search space with its evaluation state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub id: u64,
    /// Natural-coordinate position, in search-space dimension order.
    pub point: Vec<f64>,
    pub objective: Option<f64>,
    pub status: TrialStatus,
}

impl Trial {
    pub fn is_completed(&self) -> bool {
        self.status == TrialStatus::Completed
    }
}

/// Lie value used for not-yet-observed points in a parallel batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiarStrategy {
    /// Lie with the best observed objective (conservative for
    /// maximization).
    Max,
    /// Lie with the worst observed objective.
    Min,
    /// Lie with the mean observed objective.
    Mean,
}

/// Optimizer settings.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Completed trials required before model-based suggestion starts.
    pub n_init: usize,
    /// Hard cap on the batch size q.
    pub parallel_cap: usize,
    pub liar: LiarStrategy,
    /// Random probes per expected-improvement maximization.
    pub ei_probes: usize,
    /// Probes kept for coordinate-descent refinement.
    pub ei_refine_top: usize,
    /// Minimum pairwise distance between suggestions in unit coordinates.
    pub min_distance: f64,
    pub gp: GpConfig,
    /// Seeds the low-discrepancy scramble (the caller's generator drives
    /// everything else).
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            n_init: 10,
            parallel_cap: 64,
            liar: LiarStrategy::Max,
            ei_probes: 2048,
            ei_refine_top: 8,
            min_distance: 1e-6,
            gp: GpConfig::default(),
            seed: 0,
        }
    }
}

/// Trial history plus the machinery to extend it.
///
/// Suggestion and observation mutate shared state and must be externally
/// serialized; evaluations of distinct suggested trials may run in parallel
/// and report back through [`SearchState::observe`] in any order.
pub struct SearchState {
    space: SearchSpace,
    config: SearchConfig,
    trials: Vec<Trial>,
    halton: ScrambledHalton,
    hyper_cache: Option<(u64, GpHyperparams)>,
}

impl SearchState {
    pub fn new(space: SearchSpace, config: SearchConfig) -> Self {
        let halton = ScrambledHalton::new(space.len(), config.seed);
        SearchState { space, config, trials: Vec::new(), halton, hyper_cache: None }
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn completed(&self) -> impl Iterator<Item = &Trial> {
        self.trials.iter().filter(|t| t.is_completed())
    }

    pub fn pending(&self) -> impl Iterator<Item = &Trial> {
        self.trials.iter().filter(|t| !t.is_completed())
    }

    /// Proposes `q` mutually distinct in-bounds points and registers them as
    /// suggested trials.
    pub fn suggest<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<Vec<Trial>> {
        if q == 0 {
            return Err(Error::input("batch size q must be at least 1"));
        }
        if q > self.config.parallel_cap {
            return Err(Error::input(format!(
                "batch size {q} exceeds the parallel cap {}",
                self.config.parallel_cap
            )));
        }

        let completed: Vec<(Vec<f64>, f64)> = self
            .completed()
            .map(|t| (self.space.to_unit_clamped(&t.point), t.objective.unwrap()))
            .collect();

        let unit_batch = if completed.len() < self.config.n_init {
            self.quasi_random_batch(q)
        } else {
            self.liar_batch(q, &completed, rng)?
        };

        let mut out = Vec::with_capacity(q);
        for unit in unit_batch {
            let trial = Trial {
                id: self.trials.len() as u64,
                point: self.space.from_unit(&unit),
                objective: None,
                status: TrialStatus::Suggested,
            };
            self.trials.push(trial.clone());
            out.push(trial);
        }
        Ok(out)
    }

    /// Marks a suggested trial as running (bookkeeping only).
    pub fn mark_running(&mut self, id: u64) -> Result<()> {
        let trial = self.trial_mut(id)?;
        if trial.status == TrialStatus::Completed {
            return Err(Error::input(format!("trial {id} already completed")));
        }
        trial.status = TrialStatus::Running;
        Ok(())
    }

    /// Records the objective of a suggested or running trial. Repeating an
    /// observation with the identical value is a no-op; a different value is
    /// an error.
    pub fn observe(&mut self, id: u64, objective: f64) -> Result<()> {
        if !objective.is_finite() {
            return Err(Error::input(format!("objective must be finite, got {objective}")));
        }
        let trial = self.trial_mut(id)?;
        if trial.status == TrialStatus::Completed {
            if trial.objective == Some(objective) {
                return Ok(());
            }
            return Err(Error::input(format!(
                "trial {id} already observed with {:?}, now {objective}",
                trial.objective
            )));
        }
        trial.objective = Some(objective);
        trial.status = TrialStatus::Completed;
        Ok(())
    }

    /// The completed trial with the highest objective; ties go to the lowest
    /// id.
    pub fn best(&self) -> Result<&Trial> {
        self.completed()
            .reduce(|best, t| if t.objective.unwrap() > best.objective.unwrap() { t } else { best })
            .ok_or_else(|| Error::state("no completed trials yet"))
    }

    /// Rebuilds history from logged events (crash recovery).
    pub fn replay(&mut self, events: &[TrialEvent]) -> Result<()> {
        for event in events {
            match event.event {
                EventKind::Suggest => {
                    let map = event
                        .point
                        .as_ref()
                        .ok_or_else(|| Error::input("suggest event without a point"))?;
                    let point = self.space.point_from_map(map)?;
                    if !self.space.contains(&point) {
                        return Err(Error::input(format!(
                            "logged trial {} is out of bounds",
                            event.id
                        )));
                    }
                    if event.id != self.trials.len() as u64 {
                        return Err(Error::input(format!(
                            "log replays trial id {} but {} trials exist",
                            event.id,
                            self.trials.len()
                        )));
                    }
                    self.trials.push(Trial {
                        id: event.id,
                        point,
                        objective: None,
                        status: TrialStatus::Suggested,
                    });
                }
                EventKind::Observe => {
                    let objective = event
                        .objective
                        .ok_or_else(|| Error::input("observe event without an objective"))?;
                    self.observe(event.id, objective)?;
                }
            }
        }
        Ok(())
    }

    fn trial_mut(&mut self, id: u64) -> Result<&mut Trial> {
        self.trials
            .iter_mut()
            .find(|t| t.id == id)
            .ok_or_else(|| Error::input(format!("unknown trial id {id}")))
    }

    fn quasi_random_batch(&mut self, q: usize) -> Vec<Vec<f64>> {
        // index by total suggestion count: distinct across rounds and
        // reconstructable after a log replay
        let base = self.trials.len() as u64;
        (0..q as u64).map(|j| self.halton.point(base + j + 1)).collect()
    }

    fn liar_batch<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        completed: &[(Vec<f64>, f64)],
        rng: &mut R,
    ) -> Result<Vec<Vec<f64>>> {
        let objectives: Vec<f64> = completed.iter().map(|(_, y)| *y).collect();
        let best = objectives.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lie = match self.config.liar {
            LiarStrategy::Max => best,
            LiarStrategy::Min => objectives.iter().copied().fold(f64::INFINITY, f64::min),
            LiarStrategy::Mean => objectives.iter().sum::<f64>() / objectives.len() as f64,
        };

        // busy points enter the surrogate as lies as well
        let mut data = completed.to_vec();
        let mut occupied: Vec<Vec<f64>> = completed.iter().map(|(x, _)| x.clone()).collect();
        for t in self.trials.iter().filter(|t| !t.is_completed()) {
            let unit = self.space.to_unit_clamped(&t.point);
            occupied.push(unit.clone());
            data.push((unit, lie));
        }

        let hyper = self.hyperparams_for(&data)?;
        let mut model = gp::fit_with_hyperparams(&data, hyper)?;

        let mut batch = Vec::with_capacity(q);
        for j in 0..q {
            let raw = self.maximize_ei(&model, best, rng);
            let point = self.separate(raw, &occupied, rng)?;
            occupied.push(point.clone());
            batch.push(point.clone());
            if j + 1 < q {
                model = model.with_extra(point, lie)?;
            }
        }
        Ok(batch)
    }

    // Full likelihood optimization is scheduled by history size: always for
    // small histories, then once per geometric growth rung.
    fn hyperparams_for(&mut self, data: &[(Vec<f64>, f64)]) -> Result<GpHyperparams> {
        let rung = fit_rung(data.len());
        if let Some((cached_rung, hyper)) = &self.hyper_cache {
            if *cached_rung == rung {
                return Ok(hyper.clone());
            }
        }
        let model = gp::fit(data, &self.config.gp)?;
        let hyper = model.hyperparams().clone();
        self.hyper_cache = Some((rung, hyper.clone()));
        Ok(hyper)
    }

    fn maximize_ei<R: Rng + ?Sized>(&self, model: &GpModel, best: f64, rng: &mut R) -> Vec<f64> {
        let dims = self.space.len();
        let mut probes: Vec<(f64, Vec<f64>)> = (0..self.config.ei_probes)
            .map(|_| {
                let x: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
                (gp::expected_improvement(model, &x, best), x)
            })
            .collect();
        probes.sort_by(|a, b| b.0.total_cmp(&a.0));
        probes.truncate(self.config.ei_refine_top.max(1));

        let mut champion = probes[0].clone();
        for (mut ei, mut x) in probes {
            let mut step = 0.25;
            while step >= 1e-3 {
                let mut improved = false;
                for c in 0..dims {
                    for dir in [1.0, -1.0] {
                        let mut trial = x.clone();
                        trial[c] = (trial[c] + dir * step).clamp(0.0, 1.0);
                        let s = gp::expected_improvement(model, &trial, best);
                        if s > ei {
                            ei = s;
                            x = trial;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                }
            }
            if ei > champion.0 {
                champion = (ei, x);
            }
        }
        champion.1
    }

    // Nudges a candidate until it clears the minimum distance to all
    // occupied points.
    fn separate<R: Rng + ?Sized>(
        &self,
        mut point: Vec<f64>,
        occupied: &[Vec<f64>],
        rng: &mut R,
    ) -> Result<Vec<f64>> {
        let min_dist = self.config.min_distance;
        for attempt in 0..64 {
            let clear = occupied.iter().all(|other| distance(&point, other) > min_dist);
            if clear {
                return Ok(point);
            }
            let radius = min_dist.max(1e-4) * (1 << (attempt / 8).min(10)) as f64 * 10.0;
            for c in point.iter_mut() {
                *c = (*c + rng.random_range(-radius..radius)).clamp(0.0, 1.0);
            }
        }
        Err(Error::numerical("could not separate a suggestion from existing trials"))
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn fit_rung(n: usize) -> u64 {
    if n <= 32 {
        n as u64
    } else {
        1000 + ((n as f64 / 32.0).ln() / 1.25f64.ln()).floor() as u64
    }
}

/// Fits the GP surrogate to the completed trials of a history.
pub fn fit_gp(trials: &[Trial], space: &SearchSpace, config: &GpConfig) -> Result<GpModel> {
    let data: Vec<(Vec<f64>, f64)> = trials
        .iter()
        .filter(|t| t.is_completed())
        .map(|t| (space.to_unit_clamped(&t.point), t.objective.unwrap()))
        .collect();
    if data.is_empty() {
        return Err(Error::state("need at least one completed trial to fit a model"));
    }
    gp::fit(&data, config)
}

/// Expected improvement of a natural-coordinate point over `best_so_far`.
pub fn expected_improvement(
    model: &GpModel,
    space: &SearchSpace,
    point: &[f64],
    best_so_far: f64,
) -> Result<f64> {
    let unit = space.to_unit(point)?;
    Ok(gp::expected_improvement(model, &unit, best_so_far))
}
