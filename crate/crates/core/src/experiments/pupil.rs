//! Driver for a trial-by-samples pupil table: imputation and scaling of the
//! sample columns, one shuffled pass of training against the condition
//! label, and export of weight features for an external classifier.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::events::{
    build_numeric_events, export_weight_features, MissingOrder, NumericColumns, NumericEvents,
    NumericTable, OutcomeColumns, Value,
};
use crate::rule::{train, SchedulePolicy, TrainingConfig, WeightMatrix};

pub const CONDITION_COLUMN: &str = "condition";

/// Shape and noise of a synthetic pupil table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PupilSpec {
    pub trials: usize,
    pub samples: usize,
    pub conditions: usize,
    /// Probability that a sample is recorded as missing.
    pub missing_rate: f64,
    pub seed: u64,
}

impl Default for PupilSpec {
    fn default() -> Self {
        Self {
            trials: 141,
            samples: 60,
            conditions: 9,
            missing_rate: 0.05,
            seed: 1,
        }
    }
}

pub fn sample_columns(samples: usize) -> Vec<String> {
    (1..=samples).map(|i| format!("part{i}")).collect()
}

/// Pupil traces whose level and slope depend on the trial's condition,
/// plus Gaussian noise and randomly missing samples.
pub fn gen_pupil_table(spec: &PupilSpec) -> Result<NumericTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, 0.15).expect("valid sd");
    let mut columns = sample_columns(spec.samples);
    columns.push(CONDITION_COLUMN.to_owned());
    let conditions = spec.conditions.max(1);
    let rows = (0..spec.trials)
        .map(|_| {
            let c = rng.gen_range(0..conditions);
            let level = 3.0 + 0.1 * c as f64;
            let slope = 0.002 * (c as f64 - conditions as f64 / 2.0);
            let mut row: Vec<Value> = (0..spec.samples)
                .map(|s| {
                    if rng.gen_bool(spec.missing_rate) {
                        Value::Missing
                    } else {
                        Value::Num(level + slope * s as f64 + noise.sample(&mut rng))
                    }
                })
                .collect();
            row.push(Value::Text(format!("cond{}", c + 1)));
            row
        })
        .collect();
    NumericTable::new(columns, rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PupilConfig {
    pub learning_rate: f64,
    pub order: MissingOrder,
    /// Seeds the single shuffled pass.
    pub seed: u64,
}

impl Default for PupilConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            order: MissingOrder::default(),
            seed: 1,
        }
    }
}

pub struct PupilRun {
    pub events: NumericEvents,
    pub weights: WeightMatrix,
}

impl PupilRun {
    pub fn export_features<W: Write>(&self, out: W) -> Result<()> {
        export_weight_features(
            &self.weights,
            &self.events.events,
            &self.events.cue_names,
            &self.events.outcome_names,
            out,
        )
    }
}

/// Trains on every column except the condition label.
pub fn run_pupil_pipeline(table: &NumericTable, config: &PupilConfig) -> Result<PupilRun> {
    let cues = table
        .columns()
        .iter()
        .filter(|c| c.as_str() != CONDITION_COLUMN)
        .cloned()
        .collect();
    let columns = NumericColumns {
        cues,
        outcomes: OutcomeColumns::Label(CONDITION_COLUMN.to_owned()),
    };
    let events = build_numeric_events(table, &columns, config.order)?;
    let training = TrainingConfig::new(config.learning_rate)
        .with_ordering(SchedulePolicy::ShuffledEpochs { seed: config.seed });
    let weights = train(&events.events, &training)?.weights;
    Ok(PupilRun { events, weights })
}
