use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::rule::{predict, LearningEvent, WeightMatrix};
use crate::util::format_sig;

/// Writes one CSV row per event for analysis outside this crate.
///
/// Columns: `event`, the original cue values (`cue:<name>`), the activation
/// of every outcome (`act:<outcome>`), and the weight row of every cue that
/// is active in the event (`w:<cue>:<outcome>`, zero when the cue is
/// silent). Numbers carry 17 significant digits.
pub fn export_weight_features<W: Write>(
    weights: &WeightMatrix,
    events: &[LearningEvent],
    cue_names: &[String],
    outcome_names: &[String],
    out: W,
) -> Result<()> {
    if cue_names.len() != weights.n_cues() {
        return Err(Error::DimensionMismatch {
            what: "cue names",
            expected: weights.n_cues(),
            found: cue_names.len(),
        });
    }
    if outcome_names.len() != weights.n_outcomes() {
        return Err(Error::DimensionMismatch {
            what: "outcome names",
            expected: weights.n_outcomes(),
            found: outcome_names.len(),
        });
    }
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["event".to_owned()];
    header.extend(cue_names.iter().map(|c| format!("cue:{c}")));
    header.extend(outcome_names.iter().map(|o| format!("act:{o}")));
    for c in cue_names {
        header.extend(outcome_names.iter().map(|o| format!("w:{c}:{o}")));
    }
    writer.write_record(&header)?;

    let k = weights.n_outcomes();
    let mut record = Vec::with_capacity(header.len());
    for (n, event) in events.iter().enumerate() {
        let activation = predict(event, weights)?;
        record.clear();
        record.push(n.to_string());
        let cues = event.cues.to_dense();
        record.extend(cues.iter().map(|&x| format_sig(x, 17)));
        record.extend(activation.iter().map(|&y| format_sig(y, 17)));
        for (i, &x) in cues.iter().enumerate() {
            if x != 0.0 {
                record.extend(weights.row(i).into_iter().map(|w| format_sig(w, 17)));
            } else {
                record.extend(std::iter::repeat_n(format_sig(0.0, 17), k));
            }
        }
        writer.write_record(&record)?;
    }
    writer.flush().map_err(|e| Error::io("<features>", e))?;
    Ok(())
}

/// Exported features read back as numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.columns.iter().position(|x| x == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }
}

pub fn read_feature_csv<R: Read>(input: R) -> Result<FeatureTable> {
    let mut reader = csv::Reader::from_reader(input);
    let columns: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|e| Error::Parse {
                    path: "<features>".into(),
                    line: n + 2,
                    message: format!("bad number {f:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(FeatureTable { columns, rows })
}
