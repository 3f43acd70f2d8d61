use crate::error::Result;
use crate::sparse::SparseEventBatch;

use super::VocabMap;

/// Words of context taken before and after the target.
pub const PRECEDING: usize = 2;
pub const FOLLOWING: usize = 1;

/// Context words and target for one position of a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowEvent<'a> {
    pub cues: Vec<&'a str>,
    pub outcome: &'a str,
}

/// Slides a four-word window (two before, the target, one after) over one
/// sentence. Windows stop at the sentence edges, so the first target has no
/// preceding context and the last has no following context.
pub fn window_tokens<S: AsRef<str>>(sentence: &[S]) -> Vec<WindowEvent<'_>> {
    (0..sentence.len())
        .map(|pos| {
            let lo = pos.saturating_sub(PRECEDING);
            let hi = (pos + 1 + FOLLOWING).min(sentence.len());
            let cues = (lo..pos)
                .chain(pos + 1..hi)
                .map(|i| sentence[i].as_ref())
                .collect();
            WindowEvent {
                cues,
                outcome: sentence[pos].as_ref(),
            }
        })
        .collect()
}

/// Window events for every token of every sentence; one event per token.
/// Context words become cues and the target word the single outcome, in
/// separate vocabulary namespaces.
pub fn build_window_events<S: AsRef<str>>(
    sentences: &[Vec<S>],
    vocab: &mut VocabMap,
) -> Result<SparseEventBatch> {
    let mut batch = SparseEventBatch::new(vocab.cues.len(), vocab.outcomes.len());
    for sentence in sentences {
        for w in window_tokens(sentence) {
            let mut cues: Vec<usize> = w.cues.iter().map(|t| vocab.cues.intern(t)).collect();
            cues.sort_unstable();
            cues.dedup();
            let outcome = vocab.outcomes.intern(w.outcome);
            batch.grow(vocab.cues.len(), vocab.outcomes.len());
            batch.push(cues, vec![outcome])?;
        }
    }
    Ok(batch)
}
