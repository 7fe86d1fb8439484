use std::collections::HashSet;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{collapse_whitespace, strip_markup, Corpus, CorpusError, DocUnit, SmellLabels};

/// On-disk record: one JSON object per line.
#[derive(Debug, Serialize, Deserialize)]
struct Record {
    id: String,
    package: String,
    class: String,
    prototype: String,
    description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description_html: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<SmellLabels>,
}

/// Reads a JSONL corpus. Blank lines are skipped; line numbers in errors are
/// 1-based. Descriptions are normalized through [`strip_markup`].
pub fn parse_jsonl<R: BufRead>(reader: R) -> Result<Corpus, CorpusError> {
    let mut units = Vec::new();
    let mut labels = Vec::new();
    let mut unlabeled = 0usize;
    let mut seen = HashSet::new();

    for (idx, line) in reader.split(b'\n').enumerate() {
        let line_no = idx + 1;
        let raw = line?;
        let text = std::str::from_utf8(&raw).map_err(|_| CorpusError::MalformedLine {
            line: line_no,
            reason: "invalid UTF-8".into(),
        })?;
        let text = text.trim_end_matches('\r');
        if text.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(text).map_err(|e| CorpusError::MalformedLine {
            line: line_no,
            reason: e.to_string(),
        })?;
        let prototype = collapse_whitespace(&record.prototype);
        if record.id.is_empty() || prototype.is_empty() {
            return Err(CorpusError::MalformedLine {
                line: line_no,
                reason: "id and prototype must be non-empty".into(),
            });
        }
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId(record.id));
        }
        match record.labels {
            Some(l) => labels.push(l),
            None => unlabeled += 1,
        }
        units.push(DocUnit {
            id: record.id,
            package_name: record.package,
            class_name: record.class,
            prototype,
            description_html: record.description_html,
            description_text: strip_markup(&record.description),
        });
    }

    let labels = match (labels.is_empty(), unlabeled) {
        (true, _) => None,
        (false, 0) => Some(labels),
        (false, _) => return Err(CorpusError::MixedLabeling),
    };
    Corpus::new(units, labels)
}

/// Writes the corpus in the same schema [`parse_jsonl`] reads, LF-terminated.
pub fn write_jsonl<W: Write>(corpus: &Corpus, mut writer: W) -> Result<(), CorpusError> {
    for (unit, labels) in corpus.iter() {
        let record = Record {
            id: unit.id.clone(),
            package: unit.package_name.clone(),
            class: unit.class_name.clone(),
            prototype: unit.prototype.clone(),
            description: unit.description_text.clone(),
            description_html: unit.description_html.clone(),
            labels: labels.copied(),
        };
        serde_json::to_writer(&mut writer, &record).map_err(std::io::Error::from)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
