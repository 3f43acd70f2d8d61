use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sparse::SparseEventBatch;

use super::VocabMap;

pub const INDICATOR_HEADER: &str = "cues\toutcomes";
pub const TOKEN_SEPARATOR: char = '_';

/// Reads an indicator event file: a `cues\toutcomes` header, then one event
/// per line with `_`-joined tokens in each column.
pub fn parse_indicator_events(path: &Path) -> Result<(SparseEventBatch, VocabMap)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut vocab = VocabMap::new();
    let batch = read_indicator_events(
        BufReader::new(file),
        &path.display().to_string(),
        &mut vocab,
    )?;
    Ok((batch, vocab))
}

/// Parses indicator events from `input`, interning into `vocab` (which may
/// already hold tokens from earlier files). `name` labels error messages.
pub fn read_indicator_events<R: BufRead>(
    input: R,
    name: &str,
    vocab: &mut VocabMap,
) -> Result<SparseEventBatch> {
    let err = |line: usize, message: String| Error::Parse {
        path: name.to_owned(),
        line,
        message,
    };
    let mut batch = SparseEventBatch::new(vocab.cues.len(), vocab.outcomes.len());
    for (n, line) in input.lines().enumerate() {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if n == 0 {
            if line != INDICATOR_HEADER {
                return Err(err(lineno, format!("expected header {INDICATOR_HEADER:?}")));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (cue_field, outcome_field) = line
            .split_once('\t')
            .ok_or_else(|| err(lineno, "expected two tab-separated columns".into()))?;
        if outcome_field.contains('\t') {
            return Err(err(lineno, "more than two columns".into()));
        }
        let cues = intern_field(cue_field, |t| vocab.cues.intern(t))
            .map_err(|m| err(lineno, format!("cues: {m}")))?;
        let outcomes = intern_field(outcome_field, |t| vocab.outcomes.intern(t))
            .map_err(|m| err(lineno, format!("outcomes: {m}")))?;
        batch.grow(vocab.cues.len(), vocab.outcomes.len());
        batch.push(cues, outcomes)?;
    }
    Ok(batch)
}

fn intern_field(
    field: &str,
    mut intern: impl FnMut(&str) -> usize,
) -> std::result::Result<Vec<usize>, String> {
    if field.is_empty() {
        return Ok(Vec::new());
    }
    let mut indices = Vec::new();
    for token in field.split(TOKEN_SEPARATOR) {
        if token.is_empty() {
            return Err("empty token".into());
        }
        indices.push(intern(token));
    }
    indices.sort_unstable();
    indices.dedup();
    Ok(indices)
}

/// Writes events in the indicator format, tokens resolved through `vocab`.
pub fn write_indicator_events<W: Write>(
    batch: &SparseEventBatch,
    vocab: &VocabMap,
    mut out: W,
) -> Result<()> {
    let io = |e| Error::io("<indicator events>", e);
    writeln!(out, "{INDICATOR_HEADER}").map_err(io)?;
    let sep = TOKEN_SEPARATOR.to_string();
    for event in batch.events() {
        let cues: Vec<&str> = event
            .cues
            .iter()
            .map(|&i| vocab.cues.token(i).unwrap_or("?"))
            .collect();
        let outcomes: Vec<&str> = event
            .outcomes
            .iter()
            .map(|&i| vocab.outcomes.token(i).unwrap_or("?"))
            .collect();
        writeln!(out, "{}\t{}", cues.join(&sep), outcomes.join(&sep)).map_err(io)?;
    }
    Ok(())
}
