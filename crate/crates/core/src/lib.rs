//! Detection of API documentation smells.
//!
//! Five smells are recognised in method-level API documentation: *bloated*,
//! *lazy*, *excess structural information*, *tangled* and *fragmented*. The
//! crate provides:
//!
//! - [`corpus`]: the documentation-unit data model with JSONL and Javadoc HTML
//!   ingestion,
//! - [`metrics`]: six text metrics computed per unit,
//! - [`rules`]: percentile-threshold classifiers over those metrics,
//! - [`features`]: bag-of-words and standardized metric features,
//! - [`learn`]: linear max-margin learners under one-vs-rest, classifier
//!   chain and label powerset decompositions, plus ML-kNN,
//! - [`eval`]: iterative stratified cross-validation, multilabel scores,
//!   permutation importance and agreement statistics.

pub mod corpus;
pub mod eval;
pub mod features;
pub mod learn;
pub mod metrics;
pub mod rules;

pub use corpus::{Corpus, CorpusError, DocUnit, Smell, SmellLabels};
pub use eval::EvalError;
pub use features::{FeatureError, FeatureVector, Standardizer, Vocabulary};
pub use learn::{LearnError, MultilabelPredictor, TrainConfig};
pub use metrics::{Lexicon, MetricVector, MetricsError};
pub use rules::{RuleModel, RulesError, ThresholdSelector};

/// Any error produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
