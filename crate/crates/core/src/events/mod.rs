//! Building learning events from files and text, and exporting per-event
//! weight features.

mod features;
mod indicator;
mod numeric;
mod text;
mod trigraph;
mod window;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

pub use features::{export_weight_features, read_feature_csv, FeatureTable};
pub use indicator::{
    parse_indicator_events, read_indicator_events, write_indicator_events, INDICATOR_HEADER,
    TOKEN_SEPARATOR,
};
pub use numeric::{
    build_numeric_events, MissingOrder, NumericColumns, NumericEvents, NumericTable,
    OutcomeColumns, Value,
};
pub use text::{split_sentences, Alphabet, CorpusFilter};
pub use trigraph::{extract_trigraphs, trigraph_events, BOUNDARY};
pub use window::{build_window_events, window_tokens, WindowEvent};

/// First-seen-order token interner for one namespace.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interner {
    tokens: IndexSet<String>,
}

impl Interner {
    pub fn intern(&mut self, token: &str) -> usize {
        if let Some(i) = self.tokens.get_index_of(token) {
            return i;
        }
        self.tokens.insert_full(token.to_owned()).0
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.tokens.get_index_of(token)
    }

    pub fn token(&self, index: usize) -> Option<&str> {
        self.tokens.get_index(index).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    pub fn to_vec(&self) -> Vec<String> {
        self.tokens.iter().cloned().collect()
    }
}

/// Separate token ↔ index dictionaries for cues and outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabMap {
    pub cues: Interner,
    pub outcomes: Interner,
}

impl VocabMap {
    pub fn new() -> Self {
        Self::default()
    }
}
