use std::io::{Read, Write};
use std::path::Path;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::{LearningEvent, Signal};

/// Spelling of a missing value in numeric CSV files.
pub const MISSING: &str = "NA";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Num(f64),
    Missing,
    Text(String),
}

impl Value {
    fn parse(field: &str) -> Self {
        let field = field.trim();
        if field.is_empty() || field == MISSING {
            return Value::Missing;
        }
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => Value::Num(v),
            _ => Value::Text(field.to_owned()),
        }
    }

    fn render(&self) -> String {
        match self {
            Value::Num(v) => crate::util::format_sig(*v, 17),
            Value::Missing => MISSING.to_owned(),
            Value::Text(s) => s.clone(),
        }
    }
}

/// Rectangular table of named columns holding numbers, missing values, or
/// text labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericTable {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl NumericTable {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Value>>) -> Result<Self> {
        for row in &rows {
            if row.len() != columns.len() {
                return Err(Error::DimensionMismatch {
                    what: "table row",
                    expected: columns.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self { columns, rows })
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_reader(file)
    }

    pub fn from_csv_reader<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            rows.push(record.iter().map(Value::parse).collect());
        }
        Self::new(columns, rows)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Value::render))?;
        }
        writer.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    }

    /// Numeric view of one column; text cells are an error.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let c = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| match &row[c] {
                Value::Num(v) => Ok(Some(*v)),
                Value::Missing => Ok(None),
                Value::Text(t) => Err(Error::Parse {
                    path: "<table>".into(),
                    line: r + 2,
                    message: format!("column {name:?}: expected a number, found {t:?}"),
                }),
            })
            .collect()
    }
}

/// How the outcome side of a numeric table is encoded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum OutcomeColumns {
    /// Columns already holding 0/1 indicators.
    Indicators(Vec<String>),
    /// One categorical column, expanded one-hot in first-seen label order.
    Label(String),
    /// Real-valued criteria, used as is.
    Numeric(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericColumns {
    pub cues: Vec<String>,
    pub outcomes: OutcomeColumns,
}

/// Order of missing-value imputation and z-scaling for cue columns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum MissingOrder {
    /// Replace missing values by 0, then z-score over all rows.
    #[default]
    ImputeThenScale,
    /// Z-score over the observed values, then set missing values to 0
    /// (the column mean on the new scale).
    ScaleThenImpute,
}

#[derive(Clone, Debug)]
pub struct NumericEvents {
    pub events: Vec<LearningEvent>,
    pub cue_names: Vec<String>,
    pub outcome_names: Vec<String>,
    /// Scaled cue values, row-major by event.
    pub cue_matrix: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

/// Builds dense events from a table: cue columns are imputed and z-scored,
/// outcome columns become targets.
///
/// A cue column with zero variance after imputation is emitted as zeros and
/// reported in `warnings`.
pub fn build_numeric_events(
    table: &NumericTable,
    columns: &NumericColumns,
    order: MissingOrder,
) -> Result<NumericEvents> {
    let n = table.n_rows();
    let mut warnings = Vec::new();
    let mut scaled_columns = Vec::with_capacity(columns.cues.len());
    for name in &columns.cues {
        let raw = table.numeric_column(name)?;
        let (scaled, degenerate) = scale_column(&raw, order);
        if degenerate {
            let msg = format!("cue column {name:?} has zero variance; emitted as zeros");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        scaled_columns.push(scaled);
    }

    let (outcome_names, targets) = outcome_matrix(table, &columns.outcomes)?;

    let mut events = Vec::with_capacity(n);
    let mut cue_matrix = Vec::with_capacity(n);
    for r in 0..n {
        let cues: Vec<f64> = scaled_columns.iter().map(|c| c[r]).collect();
        events.push(LearningEvent::new(
            Signal::dense(cues.clone())?,
            Signal::dense(targets[r].clone())?,
        ));
        cue_matrix.push(cues);
    }
    Ok(NumericEvents {
        events,
        cue_names: columns.cues.clone(),
        outcome_names,
        cue_matrix,
        warnings,
    })
}

/// Returns the scaled column and whether it was degenerate.
fn scale_column(raw: &[Option<f64>], order: MissingOrder) -> (Vec<f64>, bool) {
    let basis: Vec<f64> = match order {
        MissingOrder::ImputeThenScale => raw.iter().map(|v| v.unwrap_or(0.0)).collect(),
        MissingOrder::ScaleThenImpute => raw.iter().flatten().copied().collect(),
    };
    let zeros = vec![0.0; raw.len()];
    if basis.len() < 2 {
        return (zeros, true);
    }
    let m = basis.len() as f64;
    let mean = basis.iter().sum::<f64>() / m;
    let var = basis.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let sd = var.sqrt();
    let scale = basis
        .iter()
        .fold(mean.abs(), |a, x| a.max(x.abs()))
        .max(1.0);
    if sd.is_nan() || sd <= 1e-12 * scale {
        return (zeros, true);
    }
    let scaled = raw
        .iter()
        .map(|v| match (v, order) {
            (Some(x), _) => (x - mean) / sd,
            (None, MissingOrder::ImputeThenScale) => (0.0 - mean) / sd,
            (None, MissingOrder::ScaleThenImpute) => 0.0,
        })
        .collect();
    (scaled, false)
}

fn outcome_matrix(
    table: &NumericTable,
    spec: &OutcomeColumns,
) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let n = table.n_rows();
    match spec {
        OutcomeColumns::Indicators(names) | OutcomeColumns::Numeric(names) => {
            let indicator = matches!(spec, OutcomeColumns::Indicators(_));
            let mut rows = vec![Vec::with_capacity(names.len()); n];
            for name in names {
                for (r, v) in table.numeric_column(name)?.into_iter().enumerate() {
                    let v = v.ok_or_else(|| Error::Parse {
                        path: "<table>".into(),
                        line: r + 2,
                        message: format!("outcome column {name:?} has a missing value"),
                    })?;
                    if indicator && v != 0.0 && v != 1.0 {
                        return Err(Error::Parse {
                            path: "<table>".into(),
                            line: r + 2,
                            message: format!(
                                "indicator column {name:?} holds {v}, expected 0 or 1"
                            ),
                        });
                    }
                    rows[r].push(v);
                }
            }
            Ok((names.clone(), rows))
        }
        OutcomeColumns::Label(name) => {
            let c = table.column_index(name)?;
            let labels: Vec<Option<String>> = table
                .rows()
                .iter()
                .map(|row| match &row[c] {
                    Value::Text(t) => Some(t.clone()),
                    Value::Num(v) => Some(v.to_string()),
                    Value::Missing => None,
                })
                .collect();
            let levels: IndexSet<String> = labels.iter().flatten().cloned().collect();
            let rows = labels
                .iter()
                .map(|l| {
                    let mut t = vec![0.0; levels.len()];
                    if let Some(l) = l {
                        t[levels.get_index_of(l).expect("collected above")] = 1.0;
                    }
                    t
                })
                .collect();
            Ok((levels.into_iter().collect(), rows))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(csv: &str) -> NumericTable {
        NumericTable::from_csv_reader(csv.as_bytes()).unwrap()
    }

    #[test]
    fn impute_then_scale_fixture() {
        let t = table("a,y\n2,1\nNA,0\n4,1\n");
        let cols = NumericColumns {
            cues: vec!["a".into()],
            outcomes: OutcomeColumns::Indicators(vec!["y".into()]),
        };
        let ev = build_numeric_events(&t, &cols, MissingOrder::ImputeThenScale).unwrap();
        let a: Vec<f64> = ev.cue_matrix.iter().map(|r| r[0]).collect();
        for (got, want) in a.iter().zip([0.0, -1.0, 1.0]) {
            assert!((got - want).abs() < 1e-15, "{a:?}");
        }
        assert!(ev.warnings.is_empty());
    }

    #[test]
    fn scale_then_impute_fixture() {
        // Observed (2, 4): mean 3, sd √2; missing lands on 0.
        let t = table("a,y\n2,1\nNA,0\n4,1\n");
        let cols = NumericColumns {
            cues: vec!["a".into()],
            outcomes: OutcomeColumns::Indicators(vec!["y".into()]),
        };
        let ev = build_numeric_events(&t, &cols, MissingOrder::ScaleThenImpute).unwrap();
        let a: Vec<f64> = ev.cue_matrix.iter().map(|r| r[0]).collect();
        let s = 1.0 / 2f64.sqrt();
        for (got, want) in a.iter().zip([-s, 0.0, s]) {
            assert!((got - want).abs() < 1e-15, "{a:?}");
        }
    }

    #[test]
    fn constant_column_warns() {
        let t = table("a,b,y\n3,1,1\n3,2,0\n3,3,1\n");
        let cols = NumericColumns {
            cues: vec!["a".into(), "b".into()],
            outcomes: OutcomeColumns::Indicators(vec!["y".into()]),
        };
        let ev = build_numeric_events(&t, &cols, MissingOrder::ImputeThenScale).unwrap();
        assert!(ev.cue_matrix.iter().all(|r| r[0] == 0.0));
        assert_eq!(ev.warnings.len(), 1);
    }

    #[test]
    fn label_column_expands_one_hot() {
        let t = table("x,cond\n1,voice.typical\n2,prep.natural\n3,voice.typical\n");
        let cols = NumericColumns {
            cues: vec!["x".into()],
            outcomes: OutcomeColumns::Label("cond".into()),
        };
        let ev = build_numeric_events(&t, &cols, MissingOrder::ImputeThenScale).unwrap();
        assert_eq!(ev.outcome_names, vec!["voice.typical", "prep.natural"]);
        assert_eq!(ev.events[1].targets.to_dense(), vec![0.0, 1.0]);
    }

    #[test]
    fn bad_inputs() {
        let t = table("a,y\n1,2\n2,0\n");
        let cols = NumericColumns {
            cues: vec!["a".into()],
            outcomes: OutcomeColumns::Indicators(vec!["y".into()]),
        };
        assert!(build_numeric_events(&t, &cols, MissingOrder::default()).is_err());
        let cols = NumericColumns {
            cues: vec!["nope".into()],
            outcomes: OutcomeColumns::Numeric(vec!["y".into()]),
        };
        assert!(matches!(
            build_numeric_events(&t, &cols, MissingOrder::default()),
            Err(Error::UnknownColumn(_))
        ));
        assert!(NumericTable::new(vec!["a".into()], vec![vec![]]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = table("a,b,lab\n0.1,NA,x\n-2.5,3,y\n");
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(NumericTable::from_csv_reader(out.as_slice()).unwrap(), t);
    }
}
