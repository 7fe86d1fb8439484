//! Evaluation: fold assignment, multilabel scores, cross-validation,
//! permutation importance and agreement statistics.

mod agreement;
mod crossval;
mod folds;
mod importance;
mod report;
mod scores;

pub use agreement::{cohen_kappa, kappa_per_smell, phi, phi_matrix, PhiMatrix};
pub use crossval::{cross_validate, cv_importance, CvInput, EvalReport, FoldResult, ModelSpec};
pub use folds::{fold_deviation, iterative_stratified_folds, random_folds, FoldAssignment};
pub use importance::{permutation_importance, FeatureImportance, DEFAULT_REPEATS};
pub use report::{markdown_table, phi_csv};
pub use scores::{label_metrics, multilabel_metrics, ConfusionCounts, LabelScores, MultilabelScores, SmellScores};

use crate::corpus::CorpusError;
use crate::features::FeatureError;
use crate::learn::LearnError;
use crate::rules::RulesError;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("nothing to evaluate")]
    EmptyInput,
    #[error("need at least k = {k} instances, got {m}")]
    TooFewInstances { m: usize, k: usize },
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("feature index {index} out of range for dimension {dim}")]
    BadFeatureIndex { index: usize, dim: usize },
    #[error("repeats must be at least 1")]
    InvalidRepeats,
    #[error("operation not available for `{0}` features")]
    UnsupportedFeatures(&'static str),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Rules(#[from] RulesError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Learn(#[from] LearnError),
}

pub(crate) fn check_lengths(left: usize, right: usize) -> Result<(), EvalError> {
    if left != right {
        return Err(EvalError::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(EvalError::EmptyInput);
    }
    Ok(())
}
