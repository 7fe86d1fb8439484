use std::collections::HashSet;

use super::MetricsError;

const DEFAULT_ENGLISH: &str = include_str!("../../data/lexicon_en.txt");

/// Common-word list used to recognise jargon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    common_words: HashSet<String>,
}

impl Lexicon {
    /// The embedded list of the 10,000 most frequent English words.
    pub fn default_english() -> Self {
        Self::parse(DEFAULT_ENGLISH).expect("embedded lexicon is valid")
    }

    /// Parses one lowercase word per line; `#` starts a comment and blank
    /// lines are ignored.
    pub fn parse(source: &str) -> Result<Self, MetricsError> {
        let mut words = HashSet::new();
        for (i, line) in source.lines().enumerate() {
            let entry = line.split('#').next().unwrap_or_default().trim();
            if entry.is_empty() {
                continue;
            }
            if entry.chars().any(|c| c.is_whitespace() || c.is_uppercase()) {
                return Err(MetricsError::InvalidLexiconEntry(i + 1));
            }
            words.insert(entry.to_string());
        }
        if words.is_empty() {
            return Err(MetricsError::EmptyLexicon);
        }
        Ok(Self { common_words: words })
    }

    pub fn from_words<I, S>(words: I) -> Result<Self, MetricsError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let source: Vec<String> = words.into_iter().map(|w| w.as_ref().to_string()).collect();
        Self::parse(&source.join("\n"))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.common_words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.common_words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.common_words.is_empty()
    }
}
