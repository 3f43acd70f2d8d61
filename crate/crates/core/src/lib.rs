//! Error-correction (Widrow-Hoff / Rescorla-Wagner) learning over streams of
//! cue → outcome events.
//!
//! The crate is organized by capability:
//!
//! - [`rule`]: events, the weight matrix, the update rule, schedules and the
//!   sequential trainer.
//! - [`sparse`]: kernels for present/absent (indicator) events, precision
//!   conversion and a dense-versus-sparse benchmark.
//! - [`events`]: building events from files and text (indicator TSV, letter
//!   trigraphs, word windows, numeric tables with missing values) and
//!   exporting weight features.
//! - [`experiments`]: colour naming from cone sensitivities, convergence of
//!   the rule towards least squares, and the pupil-size pipeline.
//! - [`embeddings`]: word vectors from a trained word → word matrix and their
//!   rank-correlation evaluation.
//! - [`cli`]: the `wh` command-line front end.
//!
//! ```
//! use widrow_hoff::rule::{train, LearningEvent, TrainingConfig};
//!
//! // One cue always followed by one outcome: w_t = 1 − (1 − γ)^t.
//! let events = vec![LearningEvent::dense(vec![1.0], vec![1.0]).unwrap(); 10];
//! let trained = train(&events, &TrainingConfig::new(0.1)).unwrap();
//! assert!((trained.weights.get(0, 0) - (1.0 - 0.9f64.powi(10))).abs() < 1e-12);
//! ```

pub mod cli;
pub mod embeddings;
mod error;
pub mod events;
pub mod experiments;
pub mod rule;
pub mod sparse;
mod util;

pub use error::{Error, Result};
pub use util::format_sig;
