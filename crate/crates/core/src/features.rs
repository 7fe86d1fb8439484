//! Feature extraction for the learners: bag-of-words counts and z-scored
//! metric vectors.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DocUnit};
use crate::metrics::{tokenize, MetricVector};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("standardizer has not been fitted")]
    UnfittedStandardizer,
}

/// Sparse real vector. Entries are sorted by index and never hold zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(u32, f64)>,
}

impl FeatureVector {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn from_dense(values: &[f64]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i as u32, v))
            .collect();
        Self { dim: values.len(), entries }
    }

    /// Builds from unordered `(index, value)` pairs; duplicate indices are
    /// summed.
    ///
    /// # Panics
    /// If an index is out of range.
    pub fn from_pairs(dim: usize, pairs: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, v) in pairs {
            assert!(i < dim, "index {i} out of range for dimension {dim}");
            *acc.entry(i as u32).or_default() += v;
        }
        let entries = acc.into_iter().filter(|&(_, v)| v != 0.0).collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|&(i, v)| (i as usize, v))
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&(index as u32), |&(i, _)| i)
            .map(|pos| self.entries[pos].1)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for (i, v) in self.iter() {
            dense[i] = v;
        }
        dense
    }

    /// Copy with component `index` replaced by `value`.
    pub fn with_value(&self, index: usize, value: f64) -> Self {
        assert!(index < self.dim);
        let mut entries: Vec<(u32, f64)> =
            self.entries.iter().copied().filter(|&(i, _)| i as usize != index).collect();
        if value != 0.0 {
            let pos = entries.partition_point(|&(i, _)| (i as usize) < index);
            entries.insert(pos, (index as u32, value));
        }
        Self { dim: self.dim, entries }
    }

    /// `self ⊕ other`: `other` occupies indices `self.dim()..`.
    pub fn concat(&self, other: &FeatureVector) -> Self {
        let offset = self.dim as u32;
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|&(i, v)| (i + offset, v)));
        Self { dim: self.dim + other.dim, entries }
    }

    /// Dot product with a dense vector of at least `self.dim()` components.
    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i as usize]).sum()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    /// Squared Euclidean distance, summed in index order over the union of
    /// non-zero positions.
    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut sum = 0.0;
        while i < a.len() || j < b.len() {
            let d = match (a.get(i), b.get(j)) {
                (Some(&(ia, va)), Some(&(ib, vb))) if ia == ib => {
                    i += 1;
                    j += 1;
                    va - vb
                }
                (Some(&(ia, va)), Some(&(ib, _))) if ia < ib => {
                    i += 1;
                    va
                }
                (Some(&(_, va)), None) => {
                    i += 1;
                    va
                }
                (_, Some(&(_, vb))) => {
                    j += 1;
                    -vb
                }
                (None, None) => unreachable!(),
            };
            sum += d * d;
        }
        sum
    }
}

/// Token to column mapping for bag-of-words features.
///
/// Equality compares the token mapping only.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "BTreeMap<String, u32>", into = "BTreeMap<String, u32>")]
pub struct Vocabulary {
    index: BTreeMap<String, u32>,
    /// Document frequency of retained tokens; empty after deserialization.
    doc_freq: BTreeMap<String, usize>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
    }
}

impl Eq for Vocabulary {}

impl From<BTreeMap<String, u32>> for Vocabulary {
    fn from(index: BTreeMap<String, u32>) -> Self {
        Self { index, doc_freq: BTreeMap::new() }
    }
}

impl From<Vocabulary> for BTreeMap<String, u32> {
    fn from(v: Vocabulary) -> Self {
        v.index
    }
}

impl Vocabulary {
    /// Fits on tokenized documents. Tokens with document frequency below
    /// `min_df` are dropped; with `max_features`, only the most frequent
    /// remain (ties by token order). Indices follow token order.
    pub fn fit<'a, I>(documents: I, min_df: usize, max_features: Option<usize>) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut df: HashMap<&str, usize> = HashMap::new();
        let mut n_docs = 0usize;
        for doc in documents {
            n_docs += 1;
            let unique: HashSet<&str> = doc.iter().map(String::as_str).collect();
            for tok in unique {
                *df.entry(tok).or_default() += 1;
            }
        }
        if n_docs == 0 {
            return Err(FeatureError::EmptyCorpus);
        }
        let mut kept: Vec<(&str, usize)> = df.into_iter().filter(|&(_, c)| c >= min_df).collect();
        if let Some(max) = max_features {
            kept.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
            kept.truncate(max);
        }
        let doc_freq: BTreeMap<String, usize> = kept.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
        let index = doc_freq.keys().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Ok(Self { index, doc_freq })
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).map(|&i| i as usize)
    }

    pub fn doc_freq(&self, token: &str) -> Option<usize> {
        self.doc_freq.get(token).copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, usize)> {
        self.index.iter().map(|(t, &i)| (t.as_str(), i as usize))
    }
}

/// Vocabulary over the tokenized descriptions of every unit.
pub fn build_vocabulary(
    corpus: &Corpus,
    min_df: usize,
    max_features: Option<usize>,
) -> Result<Vocabulary, FeatureError> {
    let docs: Vec<Vec<String>> = corpus.units().iter().map(|u| tokenize(&u.description_text)).collect();
    Vocabulary::fit(docs.iter().map(Vec::as_slice), min_df, max_features)
}

/// Raw term counts; out-of-vocabulary tokens are ignored.
pub fn bow_vector<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> FeatureVector {
    FeatureVector::from_pairs(
        vocab.len(),
        tokens.iter().filter_map(|t| vocab.index_of(t.as_ref())).map(|i| (i, 1.0)),
    )
}

/// Per-dimension z-scoring for metric features.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    /// Population mean and standard deviation of each metric. Zero-variance
    /// dimensions get a standard deviation of 1.
    pub fn fit(metrics: &[MetricVector]) -> Self {
        if metrics.is_empty() {
            return Self::default();
        }
        let n = metrics.len() as f64;
        let rows: Vec<[f64; 6]> = metrics.iter().map(MetricVector::as_array).collect();
        let mut means = vec![0.0; 6];
        let mut stds = vec![0.0; 6];
        for d in 0..6 {
            let mean = rows.iter().map(|r| r[d]).sum::<f64>() / n;
            let var = rows.iter().map(|r| (r[d] - mean).powi(2)).sum::<f64>() / n;
            means[d] = mean;
            stds[d] = if var.sqrt() > 1e-12 { var.sqrt() } else { 1.0 };
        }
        Self { means, stds }
    }

    pub fn is_fitted(&self) -> bool {
        self.means.len() == 6 && self.stds.len() == 6 && self.stds.iter().all(|&s| s > 0.0)
    }
}

/// The six metrics z-scored, in [`MetricVector::NAMES`] order.
pub fn rule_features(m: &MetricVector, s: &Standardizer) -> Result<FeatureVector, FeatureError> {
    if !s.is_fitted() {
        return Err(FeatureError::UnfittedStandardizer);
    }
    let values = m.as_array();
    let z: Vec<f64> = (0..6).map(|d| (values[d] - s.means[d]) / s.stds[d]).collect();
    Ok(FeatureVector::from_dense(&z))
}

/// Which features a learner consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureKind {
    Rules,
    Bow { min_df: usize, max_features: Option<usize> },
    /// Metric features followed by bag-of-words columns.
    Combined { min_df: usize, max_features: Option<usize> },
}

impl FeatureKind {
    pub const DEFAULT_MIN_DF: usize = 2;
    pub const DEFAULT_MAX_FEATURES: usize = 5_000;

    pub fn bow() -> Self {
        FeatureKind::Bow { min_df: Self::DEFAULT_MIN_DF, max_features: Some(Self::DEFAULT_MAX_FEATURES) }
    }

    pub fn combined() -> Self {
        FeatureKind::Combined { min_df: Self::DEFAULT_MIN_DF, max_features: Some(Self::DEFAULT_MAX_FEATURES) }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FeatureKind::Rules => "rule-feats",
            FeatureKind::Bow { .. } => "bow",
            FeatureKind::Combined { .. } => "rule+bow",
        }
    }
}

/// A fitted feature space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSpace {
    Rules { standardizer: Standardizer },
    Bow { vocabulary: Vocabulary },
    Combined { standardizer: Standardizer, vocabulary: Vocabulary },
}

impl FeatureSpace {
    /// Fits on training units and their precomputed metrics.
    pub fn fit(kind: FeatureKind, units: &[&DocUnit], metrics: &[MetricVector]) -> Result<Self, FeatureError> {
        let vocab = |min_df, max_features| {
            let docs: Vec<Vec<String>> = units.iter().map(|u| tokenize(&u.description_text)).collect();
            Vocabulary::fit(docs.iter().map(Vec::as_slice), min_df, max_features)
        };
        if units.is_empty() {
            return Err(FeatureError::EmptyCorpus);
        }
        Ok(match kind {
            FeatureKind::Rules => FeatureSpace::Rules { standardizer: Standardizer::fit(metrics) },
            FeatureKind::Bow { min_df, max_features } => FeatureSpace::Bow { vocabulary: vocab(min_df, max_features)? },
            FeatureKind::Combined { min_df, max_features } => FeatureSpace::Combined {
                standardizer: Standardizer::fit(metrics),
                vocabulary: vocab(min_df, max_features)?,
            },
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeatureSpace::Rules { .. } => 6,
            FeatureSpace::Bow { vocabulary } => vocabulary.len(),
            FeatureSpace::Combined { vocabulary, .. } => 6 + vocabulary.len(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            FeatureSpace::Rules { .. } => "rule-feats",
            FeatureSpace::Bow { .. } => "bow",
            FeatureSpace::Combined { .. } => "rule+bow",
        }
    }

    pub fn transform(&self, unit: &DocUnit, metrics: &MetricVector) -> Result<FeatureVector, FeatureError> {
        match self {
            FeatureSpace::Rules { standardizer } => rule_features(metrics, standardizer),
            FeatureSpace::Bow { vocabulary } => Ok(bow_vector(&tokenize(&unit.description_text), vocabulary)),
            FeatureSpace::Combined { standardizer, vocabulary } => {
                let rules = rule_features(metrics, standardizer)?;
                Ok(rules.concat(&bow_vector(&tokenize(&unit.description_text), vocabulary)))
            }
        }
    }

    /// Human-readable name of each column.
    pub fn feature_names(&self) -> Vec<String> {
        let rules = || MetricVector::NAMES.iter().map(|s| s.to_string());
        let words = |v: &Vocabulary| {
            let mut names = vec![String::new(); v.len()];
            for (t, i) in v.tokens() {
                names[i] = format!("bow:{t}");
            }
            names
        };
        match self {
            FeatureSpace::Rules { .. } => rules().collect(),
            FeatureSpace::Bow { vocabulary } => words(vocabulary),
            FeatureSpace::Combined { vocabulary, .. } => rules().chain(words(vocabulary)).collect(),
        }
    }
}
