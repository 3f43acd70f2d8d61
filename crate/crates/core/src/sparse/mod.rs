//! Kernels for present/absent (indicator) events.
//!
//! Only the active cue rows of `W` are read for the activation and only those
//! rows are written by the update, so one event costs `O(|cues| · k)`. The
//! error vector still spans every outcome: after a single update the weight
//! matrix is dense, so `W` itself is kept dense.

mod bench;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::{
    accumulate_activation, rank_one_update, warn_if_unstable, LearningEvent, Precision, Real,
    Schedule, SchedulePolicy, Signal, Storage, TraceRecord, Trained, TrainingConfig, WeightMatrix,
    WeightTrace,
};

pub use bench::{bench_run, Backend, BenchReport, BenchRun};

/// One indicator event: sorted, unique active cue and outcome indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseEvent {
    pub cues: Vec<usize>,
    pub outcomes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseEventBatch {
    n_cues: usize,
    n_outcomes: usize,
    events: Vec<SparseEvent>,
}

impl SparseEventBatch {
    pub fn new(n_cues: usize, n_outcomes: usize) -> Self {
        Self {
            n_cues,
            n_outcomes,
            events: Vec::new(),
        }
    }

    /// Adds an event. Index lists are sorted here; duplicates and
    /// out-of-range indices are rejected.
    pub fn push(&mut self, mut cues: Vec<usize>, mut outcomes: Vec<usize>) -> Result<()> {
        cues.sort_unstable();
        outcomes.sort_unstable();
        check_active("cue", &cues, self.n_cues)?;
        check_active("outcome", &outcomes, self.n_outcomes)?;
        self.events.push(SparseEvent { cues, outcomes });
        Ok(())
    }

    /// Grows the declared dimensions (used while a vocabulary is still being
    /// interned).
    pub(crate) fn grow(&mut self, n_cues: usize, n_outcomes: usize) {
        self.n_cues = self.n_cues.max(n_cues);
        self.n_outcomes = self.n_outcomes.max(n_outcomes);
    }

    pub fn n_cues(&self) -> usize {
        self.n_cues
    }

    pub fn n_outcomes(&self) -> usize {
        self.n_outcomes
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[SparseEvent] {
        &self.events
    }

    pub fn density(&self) -> DensityReport {
        let n = self.events.len().max(1) as f64;
        let cues: usize = self.events.iter().map(|e| e.cues.len()).sum();
        let outcomes: usize = self.events.iter().map(|e| e.outcomes.len()).sum();
        let mean_active_cues = cues as f64 / n;
        let mean_active_outcomes = outcomes as f64 / n;
        let ratio = |a: f64, d: usize| if d == 0 { 0.0 } else { a / d as f64 };
        DensityReport {
            mean_active_cues,
            mean_active_outcomes,
            cue_density: ratio(mean_active_cues, self.n_cues),
            outcome_density: ratio(mean_active_outcomes, self.n_outcomes),
        }
    }

    /// The same events as general [`LearningEvent`]s with 1.0 for present.
    pub fn to_learning_events(&self) -> Vec<LearningEvent> {
        self.events
            .iter()
            .map(|e| {
                let cues = Signal::indicator(self.n_cues, &e.cues).expect("validated on push");
                let targets =
                    Signal::indicator(self.n_outcomes, &e.outcomes).expect("validated on push");
                LearningEvent::new(cues, targets)
            })
            .collect()
    }

    /// Random batch where every cue and outcome is present independently with
    /// probability `density` (at least one cue per event when `density > 0`).
    pub fn random(
        n_events: usize,
        n_cues: usize,
        n_outcomes: usize,
        density: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut batch = Self::new(n_cues, n_outcomes);
        let draw = |rng: &mut ChaCha8Rng, dim: usize| -> Vec<usize> {
            if dim == 0 || density <= 0.0 {
                return Vec::new();
            }
            // Binomial count, then a uniform subset of that size.
            let count = (0..dim).filter(|_| rng.gen_bool(density.min(1.0))).count();
            let mut v = sample(rng, dim, count.max(1)).into_vec();
            v.sort_unstable();
            v
        };
        for _ in 0..n_events {
            let cues = draw(&mut rng, n_cues);
            let outcomes = draw(&mut rng, n_outcomes);
            batch.events.push(SparseEvent { cues, outcomes });
        }
        batch
    }
}

/// Mean number of active units per event and the matching densities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub mean_active_cues: f64,
    pub mean_active_outcomes: f64,
    pub cue_density: f64,
    pub outcome_density: f64,
}

fn check_active(what: &'static str, active: &[usize], dim: usize) -> Result<()> {
    for (n, &index) in active.iter().enumerate() {
        if index >= dim {
            return Err(Error::IndexOutOfRange { what, index, dim });
        }
        if n > 0 {
            if active[n - 1] == index {
                return Err(Error::DuplicateIndex { what, index });
            }
            if active[n - 1] > index {
                return Err(Error::InvalidConfig(format!(
                    "{what} indices must be sorted ascending"
                )));
            }
        }
    }
    Ok(())
}

/// Activation for an indicator cue set: the sum of the active rows of `W`.
/// `active_cues` must be sorted ascending without duplicates.
pub fn predict_sparse(active_cues: &[usize], weights: &WeightMatrix) -> Result<Vec<f64>> {
    check_active("cue", active_cues, weights.n_cues())?;
    let k = weights.n_outcomes();
    Ok(match &weights.storage {
        Storage::Double(data) => {
            let mut out = vec![0.0; k];
            accumulate_activation(data, k, active_cues.iter().map(|&i| (i, 1.0)), &mut out);
            out
        }
        Storage::Single(data) => {
            let mut out = vec![0.0f32; k];
            accumulate_activation(data, k, active_cues.iter().map(|&i| (i, 1.0f32)), &mut out);
            out.into_iter().map(f64::from).collect()
        }
    })
}

/// One update for an indicator event. The error spans all outcomes
/// (`e[m] = [m active] − y[m]`) but only the active cue rows change.
pub fn update_sparse(
    weights: &mut WeightMatrix,
    active_cues: &[usize],
    active_outcomes: &[usize],
    gamma: f64,
) -> Result<()> {
    if !gamma.is_finite() {
        return Err(Error::InvalidLearningRate(gamma));
    }
    check_active("cue", active_cues, weights.n_cues())?;
    check_active("outcome", active_outcomes, weights.n_outcomes())?;
    let mut scratch = SparseScratch::default();
    sparse_step(weights, active_cues, active_outcomes, gamma, &mut scratch)
}

#[derive(Default)]
pub(crate) struct SparseScratch {
    double: Vec<f64>,
    single: Vec<f32>,
}

pub(crate) fn sparse_step(
    weights: &mut WeightMatrix,
    cues: &[usize],
    outcomes: &[usize],
    gamma: f64,
    scratch: &mut SparseScratch,
) -> Result<()> {
    if cues.is_empty() {
        return Ok(());
    }
    let k = weights.n_outcomes();
    match &mut weights.storage {
        Storage::Double(data) => {
            indicator_step(data, k, cues, outcomes, gamma, &mut scratch.double)
        }
        Storage::Single(data) => {
            indicator_step(data, k, cues, outcomes, gamma as f32, &mut scratch.single)
        }
    }
}

fn indicator_step<T: Real>(
    data: &mut [T],
    k: usize,
    cues: &[usize],
    outcomes: &[usize],
    gamma: T,
    buf: &mut Vec<T>,
) -> Result<()> {
    let one = T::from_f64(1.0);
    buf.resize(k, T::ZERO);
    accumulate_activation(data, k, cues.iter().map(|&i| (i, one)), buf);
    for e in buf.iter_mut() {
        *e = T::ZERO - *e;
    }
    for &m in outcomes {
        buf[m] = one + buf[m];
    }
    rank_one_update(data, k, cues.iter().map(|&i| (i, one)), buf, gamma)
}

/// Trains on an indicator batch with the sparse kernels. The sorted-outcome
/// schedule needs a numeric outcome and is rejected here.
pub fn train_sparse(batch: &SparseEventBatch, config: &TrainingConfig) -> Result<Trained> {
    config.validate()?;
    if matches!(
        config.ordering,
        SchedulePolicy::SortedByOutcomePerTrialRepeat { .. }
    ) {
        return Err(Error::InvalidConfig(
            "sorted schedule requires a single numeric outcome; indicator batches have none".into(),
        ));
    }
    let mut weights = WeightMatrix::zeros(batch.n_cues(), batch.n_outcomes(), config.precision);
    let schedule = Schedule::new(batch.len(), &config.ordering, config.epochs, None)?;
    let max_active = batch.events.iter().map(|e| e.cues.len()).max().unwrap_or(0);
    warn_if_unstable(config.learning_rate, 2.0 / max_active as f64);
    let mut trace = config.trace.as_ref().map(|plan| WeightTrace {
        watched: plan.watched.clone(),
        stride: plan.resolved_stride(schedule.len()),
        records: Vec::new(),
    });
    if let Some(t) = &trace {
        for &(i, m) in &t.watched {
            if i >= batch.n_cues() || m >= batch.n_outcomes() {
                return Err(Error::InvalidConfig(format!(
                    "traced weight ({i}, {m}) out of range"
                )));
            }
        }
    }
    let mut scratch = SparseScratch::default();
    for (n, index) in schedule.enumerate() {
        let step = n as u64 + 1;
        let event = &batch.events[index];
        sparse_step(
            &mut weights,
            &event.cues,
            &event.outcomes,
            config.learning_rate,
            &mut scratch,
        )
        .map_err(|e| Error::Training {
            event: index,
            step,
            source: Box::new(e),
        })?;
        if let Some(t) = trace.as_mut() {
            if !t.watched.is_empty() && step.is_multiple_of(t.stride) {
                let values = t.watched.iter().map(|&(i, m)| weights.get(i, m)).collect();
                t.records.push(TraceRecord { step, values });
            }
        }
    }
    Ok(Trained { weights, trace })
}

/// Re-stores `weights` at the target precision. Narrowing to single
/// precision fails if any value overflows f32.
pub fn convert_precision(weights: &WeightMatrix, target: Precision) -> Result<WeightMatrix> {
    if weights.precision() == target {
        return Ok(weights.clone());
    }
    let mut out = WeightMatrix::zeros(weights.n_cues(), weights.n_outcomes(), target);
    let k = weights.n_outcomes().max(1);
    match (&weights.storage, &mut out.storage) {
        (Storage::Double(src), Storage::Single(dst)) => {
            for (n, (d, &s)) in dst.iter_mut().zip(src).enumerate() {
                let narrowed = s as f32;
                if !narrowed.is_finite() {
                    return Err(Error::PrecisionOverflow {
                        cue: n / k,
                        outcome: n % k,
                        value: s,
                    });
                }
                *d = narrowed;
            }
        }
        (Storage::Single(src), Storage::Double(dst)) => {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = s as f64;
            }
        }
        _ => unreachable!("same-precision case handled above"),
    }
    Ok(out)
}
