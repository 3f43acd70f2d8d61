//! Reproducible experiment harnesses built on the learning rule: colour
//! naming from cone cues, convergence of repeated training to least
//! squares, and a pupil-table feature pipeline.

pub mod color;
pub mod convergence;
pub mod gaussian;
pub mod ols;
pub mod pupil;

pub use color::{
    color_event, color_label, cone_cues, gen_color_events, run_color_experiment, z_bin_probability,
    Color, ColorBand, ColorEvents, ColorExperiment, ColorExperimentConfig, ConeSensitivityTable,
    LabelIntervals, SignPatterns, ZBin,
};
pub use convergence::{
    bias_events, max_abs_gap, run_convergence_experiment, ConvergenceConfig, ConvergenceTable,
    REGIME_COLUMNS,
};
pub use gaussian::{cholesky, gen_gaussian_data, GaussianSpec};
pub use ols::{design_with_intercept, ols_fit, RegressionFit};
pub use pupil::{gen_pupil_table, run_pupil_pipeline, PupilConfig, PupilRun, PupilSpec};
