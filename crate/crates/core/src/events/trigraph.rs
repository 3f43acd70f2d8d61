use crate::error::{Error, Result};
use crate::sparse::SparseEventBatch;

use super::{VocabMap, TOKEN_SEPARATOR};

/// Word boundary marker wrapped around each word before slicing.
pub const BOUNDARY: char = '#';

/// Letter trigraphs of `word`: every three-character window of `#word#`, in
/// order, with repeats dropped after their first occurrence.
///
/// Works on Unicode scalar values, so Cyrillic words slice per letter.
pub fn extract_trigraphs(word: &str) -> Result<Vec<String>> {
    if word.is_empty() {
        return Err(Error::InvalidToken {
            token: word.into(),
            reason: "empty word",
        });
    }
    if word.contains(BOUNDARY) || word.contains(TOKEN_SEPARATOR) {
        return Err(Error::InvalidToken {
            token: word.into(),
            reason: "word contains a reserved character ('#' or '_')",
        });
    }
    let chars: Vec<char> = std::iter::once(BOUNDARY)
        .chain(word.chars())
        .chain(std::iter::once(BOUNDARY))
        .collect();
    let mut out: Vec<String> = Vec::with_capacity(chars.len() - 2);
    for w in chars.windows(3) {
        let tri: String = w.iter().collect();
        if !out.contains(&tri) {
            out.push(tri);
        }
    }
    Ok(out)
}

/// One event per utterance: cues are the trigraphs of all its words, outcomes
/// the word forms themselves.
pub fn trigraph_events<S: AsRef<str>>(
    utterances: &[Vec<S>],
    vocab: &mut VocabMap,
) -> Result<SparseEventBatch> {
    let mut batch = SparseEventBatch::new(vocab.cues.len(), vocab.outcomes.len());
    for words in utterances {
        let mut cues = Vec::new();
        let mut outcomes = Vec::new();
        for word in words {
            let word = word.as_ref();
            for tri in extract_trigraphs(word)? {
                cues.push(vocab.cues.intern(&tri));
            }
            outcomes.push(vocab.outcomes.intern(word));
        }
        cues.sort_unstable();
        cues.dedup();
        outcomes.sort_unstable();
        outcomes.dedup();
        batch.grow(vocab.cues.len(), vocab.outcomes.len());
        batch.push(cues, outcomes)?;
    }
    Ok(batch)
}
