use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::event::LearningEvent;

/// Order in which events are presented to the trainer.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SchedulePolicy {
    /// Events in file order, once per epoch.
    #[default]
    AsGiven,
    /// A fresh permutation every epoch, drawn from one seeded stream.
    ShuffledEpochs { seed: u64 },
    /// Events sorted ascending by their single numeric outcome, each
    /// presented `repeats` times in a row before moving on.
    SortedByOutcomePerTrialRepeat { repeats: usize },
}

impl fmt::Display for SchedulePolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchedulePolicy::AsGiven => write!(f, "as-given"),
            SchedulePolicy::ShuffledEpochs { seed } => write!(f, "shuffled:{seed}"),
            SchedulePolicy::SortedByOutcomePerTrialRepeat { repeats } => {
                write!(f, "sorted:{repeats}")
            }
        }
    }
}

impl FromStr for SchedulePolicy {
    type Err = Error;

    /// Parses `as-given`, `shuffled:<seed>` or `sorted:<repeats>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidConfig(format!("unknown schedule {s:?}"));
        match s.split_once(':') {
            None if s == "as-given" => Ok(SchedulePolicy::AsGiven),
            Some(("shuffled", seed)) => Ok(SchedulePolicy::ShuffledEpochs {
                seed: seed.parse().map_err(|_| bad())?,
            }),
            Some(("sorted", repeats)) => Ok(SchedulePolicy::SortedByOutcomePerTrialRepeat {
                repeats: repeats.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Lazily generated sequence of event indices.
///
/// Long schedules (tens of millions of steps) are never materialized; each
/// epoch's order is produced when the epoch starts.
#[derive(Clone, Debug)]
pub struct Schedule {
    order: Vec<usize>,
    epochs: usize,
    repeats: usize,
    rng: Option<ChaCha8Rng>,
    epoch: usize,
    pos: usize,
    rep: usize,
}

impl Schedule {
    /// `sort_keys` must be supplied (one per event) for the sorted policy and
    /// is ignored otherwise.
    pub fn new(
        n_events: usize,
        policy: &SchedulePolicy,
        epochs: usize,
        sort_keys: Option<&[f64]>,
    ) -> Result<Self> {
        if n_events == 0 {
            return Err(Error::InvalidConfig(
                "schedule needs at least one event".into(),
            ));
        }
        if epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be positive".into()));
        }
        let mut order: Vec<usize> = (0..n_events).collect();
        let mut repeats = 1;
        let mut rng = None;
        match policy {
            SchedulePolicy::AsGiven => {}
            SchedulePolicy::ShuffledEpochs { seed } => {
                rng = Some(ChaCha8Rng::seed_from_u64(*seed));
            }
            SchedulePolicy::SortedByOutcomePerTrialRepeat { repeats: r } => {
                if *r == 0 {
                    return Err(Error::InvalidConfig("repeats must be positive".into()));
                }
                let keys = sort_keys.ok_or_else(|| {
                    Error::InvalidConfig("sorted schedule needs outcome values".into())
                })?;
                if keys.len() != n_events {
                    return Err(Error::DimensionMismatch {
                        what: "sort keys",
                        expected: n_events,
                        found: keys.len(),
                    });
                }
                order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
                repeats = *r;
            }
        }
        let mut schedule = Self {
            order,
            epochs,
            repeats,
            rng,
            epoch: 0,
            pos: 0,
            rep: 0,
        };
        schedule.start_epoch();
        Ok(schedule)
    }

    /// Total number of steps the schedule will yield.
    pub fn len(&self) -> u64 {
        self.order.len() as u64 * self.repeats as u64 * self.epochs as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn start_epoch(&mut self) {
        if let Some(rng) = self.rng.as_mut() {
            for (i, slot) in self.order.iter_mut().enumerate() {
                *slot = i;
            }
            self.order.shuffle(rng);
        }
    }
}

impl Iterator for Schedule {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.epoch == self.epochs {
            return None;
        }
        let item = self.order[self.pos];
        self.rep += 1;
        if self.rep == self.repeats {
            self.rep = 0;
            self.pos += 1;
            if self.pos == self.order.len() {
                self.pos = 0;
                self.epoch += 1;
                if self.epoch < self.epochs {
                    self.start_epoch();
                }
            }
        }
        Some(item)
    }
}

/// Sort keys for the sorted policy: the value of the single outcome of each
/// event. Fails unless every event has exactly one outcome column.
pub fn outcome_sort_keys(events: &[LearningEvent]) -> Result<Vec<f64>> {
    events
        .iter()
        .map(|e| {
            if e.n_outcomes() != 1 {
                Err(Error::InvalidConfig(format!(
                    "sorted schedule requires exactly one outcome column, found {}",
                    e.n_outcomes()
                )))
            } else {
                Ok(e.targets.get(0))
            }
        })
        .collect()
}

/// Materialized schedule for an event collection.
pub fn make_schedule(
    events: &[LearningEvent],
    policy: &SchedulePolicy,
    epochs: usize,
) -> Result<Vec<usize>> {
    Ok(schedule_for(events, policy, epochs)?.collect())
}

pub(crate) fn schedule_for(
    events: &[LearningEvent],
    policy: &SchedulePolicy,
    epochs: usize,
) -> Result<Schedule> {
    let keys = match policy {
        SchedulePolicy::SortedByOutcomePerTrialRepeat { .. } => Some(outcome_sort_keys(events)?),
        _ => None,
    };
    Schedule::new(events.len(), policy, epochs, keys.as_deref())
}
