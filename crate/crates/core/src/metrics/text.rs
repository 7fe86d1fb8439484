use super::{Lexicon, MetricsError};

/// Splits on runs of non-alphanumeric characters, keeping original case.
pub fn tokenize_cased(text: &str) -> Vec<&str> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .collect()
}

/// Lowercased tokens, split on runs of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_cased(text).into_iter().map(str::to_lowercase).collect()
}

/// Documentation length in words.
pub fn doc_length(text: &str) -> usize {
    tokenize_cased(text).len()
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Vowel-group syllable estimate: one per run of `aeiouy`, minus one when the
/// last group is a lone trailing `e` and another group exists; at least one.
pub fn syllables(word: &str) -> usize {
    let lower: Vec<char> = word.to_lowercase().chars().collect();
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &lower {
        let vowel = is_vowel(c);
        if vowel && !in_group {
            groups += 1;
        }
        in_group = vowel;
    }
    let n = lower.len();
    let silent_e = n >= 2 && lower[n - 1] == 'e' && !is_vowel(lower[n - 2]);
    if silent_e && groups > 1 {
        groups -= 1;
    }
    groups.max(1)
}

/// Sentence count: runs of `.`, `!` or `?` that end the text or precede
/// whitespace, so dotted names like `java.util.List` do not split sentences.
fn sentences(text: &str) -> usize {
    let chars: Vec<char> = text.trim_end().chars().collect();
    let mut count = 0;
    let mut i = 0;
    while i < chars.len() {
        if matches!(chars[i], '.' | '!' | '?') {
            while i < chars.len() && matches!(chars[i], '.' | '!' | '?') {
                i += 1;
            }
            if i == chars.len() || chars[i].is_whitespace() {
                count += 1;
            }
        } else {
            i += 1;
        }
    }
    count.max(1)
}

/// Flesch Reading Ease:
/// `206.835 - 1.015 * words/sentences - 84.6 * syllables/words`.
pub fn flesch_reading_ease(text: &str) -> Result<f64, MetricsError> {
    let words = tokenize_cased(text);
    if words.is_empty() {
        return Err(MetricsError::EmptyText);
    }
    let n_words = words.len() as f64;
    let n_sentences = sentences(text) as f64;
    let n_syllables = words.iter().map(|w| syllables(w)).sum::<usize>() as f64;
    Ok(206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (n_syllables / n_words))
}

fn is_acronym(token: &str) -> bool {
    let len = token.chars().count();
    (2..=6).contains(&len) && token.chars().all(|c| c.is_alphabetic() && c.is_uppercase())
}

/// Acronyms (2 to 6 uppercase letters) plus alphabetic words of at least four
/// letters missing from the lexicon. Each token counts at most once.
pub fn count_acronyms_jargon(tokens_cased: &[&str], lexicon: &Lexicon) -> usize {
    tokens_cased
        .iter()
        .filter(|token| {
            if is_acronym(token) {
                return true;
            }
            let lower = token.to_lowercase();
            lower.chars().count() >= 4
                && lower.chars().all(char::is_alphabetic)
                && !lexicon.contains(&lower)
        })
        .count()
}
