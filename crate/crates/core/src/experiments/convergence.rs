use std::io::Write;

use serde::{Deserialize, Serialize};

use super::gaussian::{gen_gaussian_data, GaussianSpec};
use super::ols::{design_with_intercept, ols_fit, RegressionFit};
use crate::error::{Error, Result};
use crate::events::NumericTable;
use crate::rule::{train, LearningEvent, SchedulePolicy, TrainingConfig};
use crate::util::format_sig;

/// Names of the four table columns, in order.
pub const REGIME_COLUMNS: [&str; 4] = ["ols", "single", "shuffled_10k", "sorted_10k"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceConfig {
    pub data: GaussianSpec,
    pub learning_rate: f64,
    /// Shuffled epochs, and per-trial repeats for the sorted regime.
    pub repeats: usize,
    /// Seeds the shuffling; the sample itself is seeded by `data.seed`.
    pub seed: u64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            data: GaussianSpec::default(),
            learning_rate: 0.0001,
            repeats: 10_000,
            seed: 1,
        }
    }
}

/// Intercept and slopes per regime. Every vector is ordered bias first,
/// then the predictors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<String>,
    pub ols: RegressionFit,
    pub single: Vec<f64>,
    pub shuffled: Vec<f64>,
    pub sorted: Vec<f64>,
}

impl ConvergenceTable {
    pub fn column(&self, index: usize) -> &[f64] {
        match index {
            0 => &self.ols.coefficients,
            1 => &self.single,
            2 => &self.shuffled,
            3 => &self.sorted,
            _ => panic!("regime column {index} out of range"),
        }
    }

    /// Largest absolute difference between the shuffled weights and OLS.
    pub fn shuffled_gap(&self) -> f64 {
        max_abs_gap(&self.shuffled, &self.ols.coefficients)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<convergence table>", e);
        writeln!(out, "coefficient\t{}", REGIME_COLUMNS.join("\t")).map_err(io)?;
        for (r, name) in self.rows.iter().enumerate() {
            write!(out, "{name}").map_err(io)?;
            for c in 0..REGIME_COLUMNS.len() {
                write!(out, "\t{}", format_sig(self.column(c)[r], 17)).map_err(io)?;
            }
            writeln!(out).map_err(io)?;
        }
        Ok(())
    }
}

pub fn max_abs_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Splits a table into criterion (first column) and predictor rows.
fn split_sample(table: &NumericTable) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let names = table.columns().to_vec();
    let columns = names
        .iter()
        .map(|n| {
            table
                .numeric_column(n)?
                .into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::InvalidConfig(format!("column {n:?} has missing values")))
        })
        .collect::<Result<Vec<_>>>()?;
    let y = columns[0].clone();
    let xs = (0..table.n_rows())
        .map(|r| columns[1..].iter().map(|c| c[r]).collect())
        .collect();
    Ok((y, xs))
}

/// One event per row: a constant bias cue of 1 followed by the predictors,
/// with the criterion as the single outcome.
pub fn bias_events(y: &[f64], xs: &[Vec<f64>]) -> Result<Vec<LearningEvent>> {
    y.iter()
        .zip(xs)
        .map(|(&t, x)| {
            let cues = std::iter::once(1.0).chain(x.iter().copied()).collect();
            LearningEvent::dense(cues, vec![t])
        })
        .collect()
}

pub fn run_convergence_experiment(config: &ConvergenceConfig) -> Result<ConvergenceTable> {
    let table = gen_gaussian_data(&config.data)?;
    let (y, xs) = split_sample(&table)?;
    let ols = ols_fit(&design_with_intercept(&xs), &y)?;
    let events = bias_events(&y, &xs)?;
    let column = |w: crate::rule::WeightMatrix| w.column(0);

    let base = TrainingConfig::new(config.learning_rate);
    let single = column(train(&events, &base)?.weights);
    let shuffled = column(
        train(
            &events,
            &base
                .clone()
                .with_ordering(SchedulePolicy::ShuffledEpochs { seed: config.seed })
                .with_epochs(config.repeats),
        )?
        .weights,
    );
    let sorted = column(
        train(
            &events,
            &base.with_ordering(SchedulePolicy::SortedByOutcomePerTrialRepeat {
                repeats: config.repeats,
            }),
        )?
        .weights,
    );
    let mut rows = vec!["bias".to_owned()];
    rows.extend(table.columns()[1..].iter().cloned());
    Ok(ConvergenceTable {
        rows,
        ols,
        single,
        shuffled,
        sorted,
    })
}
