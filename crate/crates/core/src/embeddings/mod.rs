//! Fixed-width word vectors read off a trained context→word weight matrix,
//! and their evaluation against human similarity judgements.
//!
//! A word's vector is its outcome column restricted to a chosen set of cue
//! rows. Rows are chosen by diversity, the 1-norm of a cue's weight row.

mod io;
mod similarity;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rule::WeightMatrix;

pub use io::{read_embeddings, read_similarity_pairs, write_embeddings};
pub use similarity::{
    cosine, evaluate_similarity, spearman, OovPolicy, SimilarityPair, SimilarityReport,
};

/// 1-norm of every cue row.
pub fn diversity(weights: &WeightMatrix) -> Vec<f64> {
    (0..weights.n_cues())
        .map(|i| weights.row(i).iter().map(|w| w.abs()).sum())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SelectionMode {
    /// The `d` rows of highest diversity, ties to the lower index.
    MostDiverse,
    /// Rows ordered by diversity and cut into `d` equal-count strata; one
    /// uniform draw from each.
    SampleDiverse { seed: u64 },
    /// `d` distinct rows drawn uniformly, ignoring diversity.
    Uniform { seed: u64 },
}

/// Picks `d` context rows. The result is ordered by descending diversity
/// for `MostDiverse`, by stratum (ascending diversity) for `SampleDiverse`,
/// and by draw order for `Uniform`.
pub fn select_context(
    weights: &WeightMatrix,
    d: usize,
    mode: &SelectionMode,
) -> Result<Vec<usize>> {
    let rows = weights.n_cues();
    if d > rows {
        return Err(Error::InvalidConfig(format!(
            "cannot select {d} context rows from {rows}"
        )));
    }
    let div = diversity(weights);
    match *mode {
        SelectionMode::MostDiverse => {
            let mut order: Vec<usize> = (0..rows).collect();
            order.sort_by(|&a, &b| div[b].total_cmp(&div[a]).then(a.cmp(&b)));
            order.truncate(d);
            Ok(order)
        }
        SelectionMode::SampleDiverse { seed } => {
            let mut order: Vec<usize> = (0..rows).collect();
            order.sort_by(|&a, &b| div[a].total_cmp(&div[b]).then(a.cmp(&b)));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..d)
                .map(|s| {
                    let lo = s * rows / d;
                    let hi = (s + 1) * rows / d;
                    order[rng.gen_range(lo..hi)]
                })
                .collect())
        }
        SelectionMode::Uniform { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok(rand::seq::index::sample(&mut rng, rows, d).into_vec())
        }
    }
}

/// Vector of `word` over the selected rows, in selection order.
pub fn embed(
    word: &str,
    weights: &WeightMatrix,
    vocabulary: &[String],
    selection: &[usize],
) -> Result<Vec<f64>> {
    let m = vocabulary
        .iter()
        .position(|w| w == word)
        .ok_or_else(|| Error::OutOfVocabulary(word.to_owned()))?;
    Ok(selection.iter().map(|&i| weights.get(i, m)).collect())
}

/// Embeddings for a whole outcome vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingSet {
    words: Vec<String>,
    selection: Vec<usize>,
    mode: Option<SelectionMode>,
    vectors: Vec<Vec<f64>>,
    index: HashMap<String, usize>,
}

impl EmbeddingSet {
    /// `vocabulary` names the outcome columns of `weights`. With
    /// `max_words`, only the first that many outcomes are kept.
    pub fn from_weights(
        weights: &WeightMatrix,
        vocabulary: &[String],
        d: usize,
        mode: SelectionMode,
        max_words: Option<usize>,
    ) -> Result<Self> {
        if vocabulary.len() != weights.n_outcomes() {
            return Err(Error::DimensionMismatch {
                what: "outcome vocabulary",
                expected: weights.n_outcomes(),
                found: vocabulary.len(),
            });
        }
        let selection = select_context(weights, d, &mode)?;
        let keep = max_words.unwrap_or(vocabulary.len()).min(vocabulary.len());
        let vectors = (0..keep)
            .map(|m| selection.iter().map(|&i| weights.get(i, m)).collect())
            .collect();
        Ok(Self::assemble(
            vocabulary[..keep].to_vec(),
            selection,
            Some(mode),
            vectors,
        ))
    }

    /// Wraps vectors from elsewhere, e.g. a file.
    pub fn from_vectors(words: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if words.len() != vectors.len() {
            return Err(Error::DimensionMismatch {
                what: "embedding rows",
                expected: words.len(),
                found: vectors.len(),
            });
        }
        let d = vectors.first().map_or(0, Vec::len);
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                what: "embedding width",
                expected: d,
                found: v.len(),
            });
        }
        Ok(Self::assemble(words, (0..d).collect(), None, vectors))
    }

    fn assemble(
        words: Vec<String>,
        selection: Vec<usize>,
        mode: Option<SelectionMode>,
        vectors: Vec<Vec<f64>>,
    ) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(n, w)| (w.clone(), n))
            .collect();
        Self {
            words,
            selection,
            mode,
            vectors,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.selection.len()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Cue rows behind each dimension.
    pub fn selection(&self) -> &[usize] {
        &self.selection
    }

    pub fn mode(&self) -> Option<&SelectionMode> {
        self.mode.as_ref()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn vector(&self, word: &str) -> Result<&[f64]> {
        self.index
            .get(word)
            .map(|&n| self.vectors[n].as_slice())
            .ok_or_else(|| Error::OutOfVocabulary(word.to_owned()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.words
            .iter()
            .map(String::as_str)
            .zip(self.vectors.iter().map(Vec::as_slice))
    }
}
