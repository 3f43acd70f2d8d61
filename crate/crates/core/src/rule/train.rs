use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::event::LearningEvent;
use super::matrix::{Precision, WeightMatrix};
use super::schedule::{schedule_for, SchedulePolicy};
use super::update::{update_event_with, Scratch};

/// Above this many scheduled steps the default trace stride grows so that at
/// most this many snapshots are kept.
pub const MAX_DEFAULT_TRACE_POINTS: u64 = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingConfig {
    pub learning_rate: f64,
    pub ordering: SchedulePolicy,
    pub epochs: usize,
    pub trace: Option<TracePlan>,
    pub precision: Precision,
}

impl TrainingConfig {
    pub fn new(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ordering: SchedulePolicy::AsGiven,
            epochs: 1,
            trace: None,
            precision: Precision::Double,
        }
    }

    pub fn with_ordering(mut self, ordering: SchedulePolicy) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_epochs(mut self, epochs: usize) -> Self {
        self.epochs = epochs;
        self
    }

    pub fn with_trace(mut self, plan: TracePlan) -> Self {
        self.trace = Some(plan);
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidLearningRate(self.learning_rate));
        }
        if self.learning_rate >= 1.0 {
            log::warn!(
                "learning rate {} >= 1: updates are no longer gradual and may diverge",
                self.learning_rate
            );
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        Ok(())
    }
}

/// Which weights to record during training, and how often.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TracePlan {
    /// `(cue, outcome)` pairs.
    pub watched: Vec<(usize, usize)>,
    /// Record after every `stride`-th step; `None` picks a default from the
    /// schedule length.
    pub stride: Option<u64>,
}

impl TracePlan {
    pub fn all(cues: usize, outcomes: usize) -> Self {
        let watched = (0..cues)
            .flat_map(|i| (0..outcomes).map(move |m| (i, m)))
            .collect();
        Self {
            watched,
            stride: None,
        }
    }

    pub fn resolved_stride(&self, total_steps: u64) -> u64 {
        match self.stride {
            Some(s) => s.max(1),
            None if total_steps <= MAX_DEFAULT_TRACE_POINTS => 1,
            None => total_steps.div_ceil(MAX_DEFAULT_TRACE_POINTS),
        }
    }
}

/// One sampled row of a [`WeightTrace`]: the 1-based step counter and the
/// value of every watched weight after that step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: u64,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTrace {
    pub watched: Vec<(usize, usize)>,
    pub stride: u64,
    pub records: Vec<TraceRecord>,
}

impl WeightTrace {
    /// Trajectory of the `n`-th watched weight as `(step, value)` pairs.
    pub fn series(&self, n: usize) -> Vec<(u64, f64)> {
        self.records.iter().map(|r| (r.step, r.values[n])).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Trained {
    pub weights: WeightMatrix,
    pub trace: Option<WeightTrace>,
}

/// Trains a zero-initialized matrix on `events` along the configured
/// schedule, strictly one event at a time.
pub fn train(events: &[LearningEvent], config: &TrainingConfig) -> Result<Trained> {
    config.validate()?;
    let first = events
        .first()
        .ok_or_else(|| Error::InvalidConfig("no events to train on".into()))?;
    let mut weights = WeightMatrix::zeros(first.n_cues(), first.n_outcomes(), config.precision);
    let trace = train_into(&mut weights, events, config)?;
    Ok(Trained { weights, trace })
}

/// Largest learning rate for which one update cannot overshoot on any of
/// `events`: `2 / max ‖c‖²`. Above it the weights can grow without limit.
pub fn max_stable_learning_rate(events: &[LearningEvent]) -> f64 {
    let max_sq = events
        .iter()
        .map(|e| e.cues.nonzero().map(|(_, x)| x * x).sum::<f64>())
        .fold(0.0, f64::max);
    2.0 / max_sq
}

pub(crate) fn warn_if_unstable(learning_rate: f64, limit: f64) {
    if learning_rate >= limit {
        log::warn!(
            "learning rate {learning_rate} is at or above the stability limit {limit:.4} \
             (2 / largest squared cue norm); weights may grow without limit"
        );
    }
}

/// Continues training an existing matrix.
pub fn train_into(
    weights: &mut WeightMatrix,
    events: &[LearningEvent],
    config: &TrainingConfig,
) -> Result<Option<WeightTrace>> {
    config.validate()?;
    for event in events {
        weights.check_cues(event.n_cues())?;
        weights.check_outcomes(event.n_outcomes())?;
    }
    let schedule = schedule_for(events, &config.ordering, config.epochs)?;
    warn_if_unstable(config.learning_rate, max_stable_learning_rate(events));

    let mut trace = match &config.trace {
        Some(plan) => {
            for &(cue, outcome) in &plan.watched {
                if cue >= weights.n_cues() {
                    return Err(Error::IndexOutOfRange {
                        what: "traced cue",
                        index: cue,
                        dim: weights.n_cues(),
                    });
                }
                if outcome >= weights.n_outcomes() {
                    return Err(Error::IndexOutOfRange {
                        what: "traced outcome",
                        index: outcome,
                        dim: weights.n_outcomes(),
                    });
                }
            }
            Some(WeightTrace {
                watched: plan.watched.clone(),
                stride: plan.resolved_stride(schedule.len()),
                records: Vec::new(),
            })
        }
        None => None,
    };

    let mut scratch = Scratch::default();
    for (n, index) in schedule.enumerate() {
        let step = n as u64 + 1;
        update_event_with(weights, &events[index], config.learning_rate, &mut scratch).map_err(
            |e| Error::Training {
                event: index,
                step,
                source: Box::new(e),
            },
        )?;
        if let Some(t) = trace.as_mut() {
            if !t.watched.is_empty() && step.is_multiple_of(t.stride) {
                let values = t.watched.iter().map(|&(i, m)| weights.get(i, m)).collect();
                t.records.push(TraceRecord { step, values });
            }
        }
    }
    Ok(trace)
}
