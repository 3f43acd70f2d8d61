//! Weight matrix export: labelled TSV for inspection and a little-endian
//! binary snapshot for exact reloads.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::util::format_sig;

use super::matrix::{Precision, Storage, WeightMatrix};
use super::train::WeightTrace;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"WHWMAT01";

/// Writes `weights` as TSV: a header of outcome labels, then one line per cue
/// starting with its label. Values carry 17 significant digits.
pub fn write_weights_tsv<W: Write>(
    weights: &WeightMatrix,
    cue_labels: &[String],
    outcome_labels: &[String],
    mut out: W,
) -> Result<()> {
    if cue_labels.len() != weights.n_cues() {
        return Err(Error::DimensionMismatch {
            what: "cue labels",
            expected: weights.n_cues(),
            found: cue_labels.len(),
        });
    }
    if outcome_labels.len() != weights.n_outcomes() {
        return Err(Error::DimensionMismatch {
            what: "outcome labels",
            expected: weights.n_outcomes(),
            found: outcome_labels.len(),
        });
    }
    let io = |e| Error::io("<weights tsv>", e);
    let mut line = String::from("cue");
    for label in outcome_labels {
        line.push('\t');
        line.push_str(label);
    }
    writeln!(out, "{line}").map_err(io)?;
    for (i, label) in cue_labels.iter().enumerate() {
        line.clear();
        line.push_str(label);
        for v in weights.row(i) {
            line.push('\t');
            line.push_str(&format_sig(v, 17));
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

/// Labelled weights read back from TSV.
#[derive(Clone, Debug)]
pub struct LabelledWeights {
    pub cue_labels: Vec<String>,
    pub outcome_labels: Vec<String>,
    pub weights: WeightMatrix,
}

pub fn read_weights_tsv<R: BufRead>(input: R) -> Result<LabelledWeights> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: "<weights tsv>".into(),
        line,
        message,
    };
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing header".into()))?
        .map_err(|e| Error::io("<weights tsv>", e))?;
    let outcome_labels: Vec<String> = header.split('\t').skip(1).map(str::to_owned).collect();
    let mut cue_labels = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io("<weights tsv>", e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        cue_labels.push(fields.next().unwrap_or_default().to_owned());
        let before = values.len();
        for f in fields {
            values.push(
                f.parse::<f64>()
                    .map_err(|e| parse_err(n + 2, format!("bad value {f:?}: {e}")))?,
            );
        }
        if values.len() - before != outcome_labels.len() {
            return Err(parse_err(
                n + 2,
                format!(
                    "expected {} values, found {}",
                    outcome_labels.len(),
                    values.len() - before
                ),
            ));
        }
    }
    let weights = WeightMatrix::from_row_major(cue_labels.len(), outcome_labels.len(), values)?;
    Ok(LabelledWeights {
        cue_labels,
        outcome_labels,
        weights,
    })
}

/// Long-format trajectories: `event_index, cue, outcome, weight`, one line
/// per watched weight per recorded step.
pub fn write_trace_tsv<W: Write>(
    trace: &WeightTrace,
    cue_labels: &[String],
    outcome_labels: &[String],
    mut out: W,
) -> Result<()> {
    let io = |e| Error::io("<trajectory>", e);
    writeln!(out, "event_index\tcue\toutcome\tweight").map_err(io)?;
    for record in &trace.records {
        for (&(cue, outcome), &w) in trace.watched.iter().zip(&record.values) {
            let cue = cue_labels.get(cue).ok_or(Error::IndexOutOfRange {
                what: "traced cue",
                index: cue,
                dim: cue_labels.len(),
            })?;
            let outcome = outcome_labels.get(outcome).ok_or(Error::IndexOutOfRange {
                what: "traced outcome",
                index: outcome,
                dim: outcome_labels.len(),
            })?;
            writeln!(
                out,
                "{}\t{cue}\t{outcome}\t{}",
                record.step,
                format_sig(w, 17)
            )
            .map_err(io)?;
        }
    }
    Ok(())
}

/// Binary snapshot layout: magic (8 bytes), cues (u64), outcomes (u64),
/// precision flag (u8: 0 double, 1 single), then row-major values. All
/// integers and floats little-endian.
pub fn write_snapshot<W: Write>(weights: &WeightMatrix, mut out: W) -> Result<()> {
    let io = |e| Error::io("<snapshot>", e);
    out.write_all(SNAPSHOT_MAGIC).map_err(io)?;
    out.write_all(&(weights.n_cues() as u64).to_le_bytes())
        .map_err(io)?;
    out.write_all(&(weights.n_outcomes() as u64).to_le_bytes())
        .map_err(io)?;
    match &weights.storage {
        Storage::Double(v) => {
            out.write_all(&[0]).map_err(io)?;
            for x in v {
                out.write_all(&x.to_le_bytes()).map_err(io)?;
            }
        }
        Storage::Single(v) => {
            out.write_all(&[1]).map_err(io)?;
            for x in v {
                out.write_all(&x.to_le_bytes()).map_err(io)?;
            }
        }
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut input: R) -> Result<WeightMatrix> {
    let io = |e| Error::io("<snapshot>", e);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic).map_err(io)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word).map_err(io)?;
    let cues = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word).map_err(io)?;
    let outcomes = u64::from_le_bytes(word) as usize;
    let mut flag = [0u8; 1];
    input.read_exact(&mut flag).map_err(io)?;
    let len = cues
        .checked_mul(outcomes)
        .ok_or_else(|| Error::Snapshot("dimensions overflow".into()))?;
    let precision = match flag[0] {
        0 => Precision::Double,
        1 => Precision::Single,
        f => return Err(Error::Snapshot(format!("unknown precision flag {f}"))),
    };
    let mut w = WeightMatrix::zeros(cues, outcomes, precision);
    match &mut w.storage {
        Storage::Double(v) => {
            for x in v.iter_mut().take(len) {
                input.read_exact(&mut word).map_err(io)?;
                *x = f64::from_le_bytes(word);
            }
        }
        Storage::Single(v) => {
            let mut half = [0u8; 4];
            for x in v.iter_mut().take(len) {
                input.read_exact(&mut half).map_err(io)?;
                *x = f32::from_le_bytes(half);
            }
        }
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest).map_err(io)? != 0 {
        return Err(Error::Snapshot("trailing bytes".into()));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    #[test]
    fn tsv_round_trip_is_exact() {
        let values = vec![0.1, -1.0 / 3.0, 1e-300, 123456.789, f64::MIN_POSITIVE, -0.0];
        let w = WeightMatrix::from_row_major(2, 3, values).unwrap();
        let mut buf = Vec::new();
        write_weights_tsv(&w, &labels("c", 2), &labels("o", 3), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("cue\to0\to1\to2\n"));
        let back = read_weights_tsv(buf.as_slice()).unwrap();
        assert_eq!(back.cue_labels, labels("c", 2));
        assert_eq!(back.weights.to_row_major(), w.to_row_major());
    }

    #[test]
    fn snapshot_round_trip_both_precisions() {
        let mut w = WeightMatrix::from_row_major(2, 2, vec![0.1, 0.2, -0.3, 4.5]).unwrap();
        let mut buf = Vec::new();
        write_snapshot(&w, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 8 + 1 + 4 * 8);
        assert_eq!(&buf[..8], SNAPSHOT_MAGIC);
        assert_eq!(read_snapshot(buf.as_slice()).unwrap(), w);

        w = crate::sparse::convert_precision(&w, Precision::Single).unwrap();
        buf.clear();
        write_snapshot(&w, &mut buf).unwrap();
        assert_eq!(buf.len(), 8 + 8 + 8 + 1 + 4 * 4);
        assert_eq!(read_snapshot(buf.as_slice()).unwrap(), w);
    }

    #[test]
    fn snapshot_rejects_garbage() {
        assert!(read_snapshot(&b"NOTMAGIC\0\0\0\0"[..]).is_err());
        let w = WeightMatrix::zeros(1, 1, Precision::Double);
        let mut buf = Vec::new();
        write_snapshot(&w, &mut buf).unwrap();
        buf.push(0);
        assert!(matches!(
            read_snapshot(buf.as_slice()),
            Err(Error::Snapshot(_))
        ));
        buf.truncate(buf.len() - 3);
        assert!(read_snapshot(buf.as_slice()).is_err());
    }
}
