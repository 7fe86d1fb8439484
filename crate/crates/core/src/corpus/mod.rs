//! Documentation units, smell labels and corpora.

mod html;
mod jsonl;
mod markup;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use html::parse_javadoc_html;
pub use jsonl::{parse_jsonl, write_jsonl};
pub use markup::{collapse_whitespace, strip_markup};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("duplicate unit id `{0}`")]
    DuplicateId(String),
    #[error("corpus mixes labeled and unlabeled units")]
    MixedLabeling,
    #[error("document contains no method-detail blocks")]
    NoMethodBlocks,
    #[error("method block {0} has no signature")]
    MalformedBlock(usize),
    #[error("corpus carries no smell labels")]
    UnlabeledCorpus,
    #[error("unit {0}: {1}")]
    InvalidUnit(usize, &'static str),
    #[error("{0} label rows for {1} units")]
    LabelCountMismatch(usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One documented API method.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocUnit {
    pub id: String,
    pub package_name: String,
    pub class_name: String,
    /// Method signature, e.g. `public int size()`.
    pub prototype: String,
    pub description_html: Option<String>,
    /// Markup-free description with whitespace runs collapsed.
    pub description_text: String,
}

/// The five documentation smells, in canonical label order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smell {
    Bloated,
    Lazy,
    ExcessStruct,
    Tangled,
    Fragmented,
}

impl Smell {
    pub const ALL: [Smell; 5] = [
        Smell::Bloated,
        Smell::Lazy,
        Smell::ExcessStruct,
        Smell::Tangled,
        Smell::Fragmented,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Snake-case key used in JSON and CSV output.
    pub fn key(self) -> &'static str {
        match self {
            Smell::Bloated => "bloated",
            Smell::Lazy => "lazy",
            Smell::ExcessStruct => "excess_struct",
            Smell::Tangled => "tangled",
            Smell::Fragmented => "fragmented",
        }
    }

    /// Human-readable column title.
    pub fn title(self) -> &'static str {
        match self {
            Smell::Bloated => "Bloated",
            Smell::Lazy => "Lazy",
            Smell::ExcessStruct => "Excess Struct",
            Smell::Tangled => "Tangled",
            Smell::Fragmented => "Fragmented",
        }
    }
}

impl fmt::Display for Smell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Smell {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Smell::ALL
            .into_iter()
            .find(|smell| smell.key() == s)
            .ok_or_else(|| format!("unknown smell `{s}`"))
    }
}

/// Multilabel smell assignment for one unit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmellLabels {
    pub bloated: bool,
    pub lazy: bool,
    pub excess_struct: bool,
    pub tangled: bool,
    pub fragmented: bool,
}

impl SmellLabels {
    pub const NONE: SmellLabels = SmellLabels {
        bloated: false,
        lazy: false,
        excess_struct: false,
        tangled: false,
        fragmented: false,
    };

    pub fn from_array(values: [bool; 5]) -> Self {
        let [bloated, lazy, excess_struct, tangled, fragmented] = values;
        Self { bloated, lazy, excess_struct, tangled, fragmented }
    }

    pub fn to_array(self) -> [bool; 5] {
        [self.bloated, self.lazy, self.excess_struct, self.tangled, self.fragmented]
    }

    pub fn get(&self, smell: Smell) -> bool {
        self.to_array()[smell.index()]
    }

    pub fn set(&mut self, smell: Smell, value: bool) {
        let mut values = self.to_array();
        values[smell.index()] = value;
        *self = Self::from_array(values);
    }

    /// Five-bit encoding with `bloated` as the most significant bit, so that
    /// numeric order equals lexicographic order of the `0/1` label string.
    pub fn encode(self) -> u8 {
        self.to_array()
            .iter()
            .fold(0u8, |acc, &bit| (acc << 1) | bit as u8)
    }

    pub fn decode(code: u8) -> Self {
        let mut values = [false; 5];
        for (i, value) in values.iter_mut().enumerate() {
            *value = code & (1 << (4 - i)) != 0;
        }
        Self::from_array(values)
    }

    pub fn count(self) -> usize {
        self.to_array().iter().filter(|&&b| b).count()
    }

    pub fn complement(self) -> Self {
        Self::from_array(self.to_array().map(|b| !b))
    }
}

/// An ordered collection of units, either fully labeled or unlabeled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    units: Vec<DocUnit>,
    labels: Option<Vec<SmellLabels>>,
}

impl Corpus {
    /// Builds a corpus, checking id uniqueness and the unit invariants.
    pub fn new(units: Vec<DocUnit>, labels: Option<Vec<SmellLabels>>) -> Result<Self, CorpusError> {
        if let Some(labels) = &labels {
            if labels.len() != units.len() {
                return Err(CorpusError::LabelCountMismatch(labels.len(), units.len()));
            }
        }
        let mut seen = HashSet::with_capacity(units.len());
        for (i, unit) in units.iter().enumerate() {
            if unit.id.is_empty() {
                return Err(CorpusError::InvalidUnit(i, "empty id"));
            }
            if unit.prototype.is_empty() {
                return Err(CorpusError::InvalidUnit(i, "empty prototype"));
            }
            if !seen.insert(unit.id.as_str()) {
                return Err(CorpusError::DuplicateId(unit.id.clone()));
            }
        }
        Ok(Self { units, labels })
    }

    pub fn units(&self) -> &[DocUnit] {
        &self.units
    }

    pub fn labels(&self) -> Option<&[SmellLabels]> {
        self.labels.as_deref()
    }

    pub fn require_labels(&self) -> Result<&[SmellLabels], CorpusError> {
        self.labels().ok_or(CorpusError::UnlabeledCorpus)
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Units paired with their labels, if any.
    pub fn iter(&self) -> impl Iterator<Item = (&DocUnit, Option<&SmellLabels>)> {
        self.units
            .iter()
            .enumerate()
            .map(|(i, u)| (u, self.labels.as_ref().map(|l| &l[i])))
    }

    /// A new corpus holding the given positions, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Corpus {
        Corpus {
            units: indices.iter().map(|&i| self.units[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| indices.iter().map(|&i| l[i]).collect()),
        }
    }

    pub fn into_parts(self) -> (Vec<DocUnit>, Option<Vec<SmellLabels>>) {
        (self.units, self.labels)
    }
}

/// Per-smell counts and the histogram of smells per unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub total: usize,
    /// Indexed by [`Smell::index`].
    pub per_smell: [usize; 5],
    /// `histogram[j]` = number of units carrying exactly `j` smells.
    pub histogram: [usize; 6],
}

impl LabelDistribution {
    pub fn count(&self, smell: Smell) -> usize {
        self.per_smell[smell.index()]
    }

    pub fn at_least_one(&self) -> usize {
        self.total - self.histogram[0]
    }
}

pub fn label_distribution(corpus: &Corpus) -> Result<LabelDistribution, CorpusError> {
    let labels = corpus.require_labels()?;
    let mut per_smell = [0usize; 5];
    let mut histogram = [0usize; 6];
    for set in labels {
        for (slot, bit) in per_smell.iter_mut().zip(set.to_array()) {
            *slot += bit as usize;
        }
        histogram[set.count()] += 1;
    }
    Ok(LabelDistribution { total: labels.len(), per_smell, histogram })
}

#[cfg(test)]
pub(crate) fn unit(id: &str, prototype: &str, text: &str) -> DocUnit {
    DocUnit {
        id: id.to_string(),
        package_name: String::new(),
        class_name: String::new(),
        prototype: prototype.to_string(),
        description_html: None,
        description_text: text.to_string(),
    }
}
