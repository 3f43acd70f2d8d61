//! The error-correction update rule.
//!
//! Every event carries a cue vector `c` (length = cues) and a target vector
//! `t` (length = outcomes). The activation of outcome `m` is the weighted sum
//! `y[m] = Σ_i c[i] · W[i, m]`, and one event changes the weights by
//!
//! ```text
//! ΔW[i, m] = c[i] · γ · (t[m] − y[m])
//! ```
//!
//! with `y` computed from the weights before the update. Rows whose cue is
//! zero are never touched, which is what makes the rule cheap on sparse
//! indicator data (see [`crate::sparse`]).

mod event;
pub mod io;
mod matrix;
mod schedule;
mod train;
mod update;

pub use event::{LearningEvent, NonZero, Signal};
pub(crate) use matrix::{accumulate_activation, rank_one_update, Real, Storage};
pub use matrix::{Precision, WeightMatrix};
pub use schedule::{make_schedule, outcome_sort_keys, Schedule, SchedulePolicy};
pub(crate) use train::warn_if_unstable;
pub use train::{
    max_stable_learning_rate, train, train_into, TracePlan, TraceRecord, Trained, TrainingConfig,
    WeightTrace, MAX_DEFAULT_TRACE_POINTS,
};
pub use update::{predict, update_event};
