//! The six per-unit documentation metrics.

mod edit;
mod lexicon;
mod refs;
mod text;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::DocUnit;

pub use edit::levenshtein;
pub use lexicon::Lexicon;
pub use refs::{count_struct_refs, count_urls};
pub use text::{
    count_acronyms_jargon, doc_length, flesch_reading_ease, syllables, tokenize, tokenize_cased,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("text contains no words")]
    EmptyText,
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("lexicon line {0}: entries must be lowercase without whitespace")]
    InvalidLexiconEntry(usize),
}

/// Readability recorded for a unit with no words. Larger than any real
/// Flesch score, so inverted threshold comparisons never flag empty text.
pub const READABILITY_SENTINEL: f64 = f64::MAX;

/// Least upper bound of the Flesch formula for text with at least one word
/// (words per sentence approaching zero, one syllable per word). Statistics
/// and features substitute it for [`READABILITY_SENTINEL`].
pub const READABILITY_CEILING: f64 = 206.835 - 84.6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub doc_length: u32,
    pub readability: f64,
    pub jargon_count: u32,
    pub url_count: u32,
    pub struct_ref_count: u32,
    pub edit_distance: u32,
}

impl MetricVector {
    pub const NAMES: [&'static str; 6] = [
        "doc_length",
        "readability",
        "jargon_count",
        "url_count",
        "struct_ref_count",
        "edit_distance",
    ];

    /// Values in canonical order with the empty-text sentinel replaced by
    /// [`READABILITY_CEILING`].
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.doc_length as f64,
            self.readability.min(READABILITY_CEILING),
            self.jargon_count as f64,
            self.url_count as f64,
            self.struct_ref_count as f64,
            self.edit_distance as f64,
        ]
    }
}

/// Computes all six metrics for one unit.
pub fn compute_metrics(unit: &DocUnit, lexicon: &Lexicon) -> MetricVector {
    let text = unit.description_text.as_str();
    let cased = tokenize_cased(text);
    MetricVector {
        doc_length: cased.len() as u32,
        readability: flesch_reading_ease(text).unwrap_or(READABILITY_SENTINEL),
        jargon_count: count_acronyms_jargon(&cased, lexicon) as u32,
        url_count: count_urls(unit) as u32,
        struct_ref_count: count_struct_refs(text) as u32,
        edit_distance: levenshtein(text, &unit.prototype) as u32,
    }
}

/// Writes `id,doc_length,readability,...` rows. The sentinel readability is
/// written as `inf`.
pub fn write_metrics_csv<W: Write>(
    rows: impl IntoIterator<Item = (impl AsRef<str>, MetricVector)>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "id,{}", MetricVector::NAMES.join(","))?;
    for (id, m) in rows {
        let readability = if m.readability == READABILITY_SENTINEL {
            "inf".to_string()
        } else {
            format!("{}", m.readability)
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(id.as_ref()),
            m.doc_length,
            readability,
            m.jargon_count,
            m.url_count,
            m.struct_ref_count,
            m.edit_distance
        )?;
    }
    Ok(())
}

pub(crate) fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}
