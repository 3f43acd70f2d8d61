use serde::{Deserialize, Serialize};

/// Letters a sentence may contain after cleaning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alphabet {
    /// Basic Cyrillic block plus `ё`/`Ё`.
    Cyrillic,
    /// ASCII letters.
    Latin,
    /// Exactly these characters.
    Custom(String),
}

impl Alphabet {
    pub fn contains(&self, c: char) -> bool {
        match self {
            Alphabet::Cyrillic => ('\u{0410}'..='\u{044F}').contains(&c) || c == 'ё' || c == 'Ё',
            Alphabet::Latin => c.is_ascii_alphabetic(),
            Alphabet::Custom(chars) => chars.contains(c),
        }
    }
}

/// Sentence pre-filter applied before event construction.
///
/// Cleaning lowercases, removes digits and punctuation, then (if an alphabet
/// is set) rejects any sentence that still contains a foreign character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFilter {
    pub lowercase: bool,
    pub strip_numerals: bool,
    pub strip_punctuation: bool,
    pub alphabet: Option<Alphabet>,
}

impl Default for CorpusFilter {
    fn default() -> Self {
        Self {
            lowercase: true,
            strip_numerals: true,
            strip_punctuation: true,
            alphabet: None,
        }
    }
}

impl CorpusFilter {
    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = Some(alphabet);
        self
    }

    /// Cleaned tokens of one sentence, or `None` if the sentence is rejected
    /// or nothing is left.
    pub fn clean_sentence(&self, sentence: &str) -> Option<Vec<String>> {
        let mut tokens = Vec::new();
        for raw in sentence.split_whitespace() {
            let mut token: String = raw
                .chars()
                .filter(|c| !(self.strip_numerals && c.is_numeric()))
                .filter(|c| !(self.strip_punctuation && is_punctuation(*c)))
                .collect();
            if self.lowercase {
                token = token.to_lowercase();
            }
            if token.is_empty() {
                continue;
            }
            if let Some(alphabet) = &self.alphabet {
                if !token.chars().all(|c| alphabet.contains(c)) {
                    return None;
                }
            }
            tokens.push(token);
        }
        (!tokens.is_empty()).then_some(tokens)
    }

    /// Splits `text` into sentences and cleans each, dropping rejects.
    pub fn clean_text(&self, text: &str) -> Vec<Vec<String>> {
        split_sentences(text)
            .into_iter()
            .filter_map(|s| self.clean_sentence(s))
            .collect()
    }
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '«' | '»' | '—' | '–' | '…' | '“' | '”' | '„' | '’')
}

/// Splits on sentence-final punctuation and line breaks.
pub fn split_sentences(text: &str) -> Vec<&str> {
    text.split(['.', '!', '?', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}
