//! Shallow multilabel learners.
//!
//! A linear max-margin base classifier is lifted to five labels by one-vs-rest
//! ([`OvrModel`]), classifier chains ([`ChainModel`]) or label powerset
//! ([`PowersetModel`]). [`MlknnModel`] is the Bayesian k-nearest-neighbour
//! alternative.

mod linear;
mod mlknn;
mod multilabel;
mod persist;

use serde::{Deserialize, Serialize};

use crate::corpus::SmellLabels;
use crate::features::FeatureVector;

pub use linear::{train_linear, LinearModel};
pub use mlknn::{train_mlknn, MlknnModel};
pub use multilabel::{
    train_cc, train_lps, train_ovr, ChainModel, ChainOrder, OvrModel, PowersetModel,
};
pub use persist::{ModelFile, SavedModel};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("expected feature dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("{features} feature rows but {labels} label rows")]
    LengthMismatch { features: usize, labels: usize },
    #[error("need more than k = {k} training instances, got {m}")]
    TooFewInstances { m: usize, k: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid model file: {0}")]
    InvalidModelFile(String),
}

pub(crate) fn check_dim(expected: usize, x: &FeatureVector) -> Result<(), LearnError> {
    if x.dim() == expected {
        Ok(())
    } else {
        Err(LearnError::DimensionMismatch { expected, found: x.dim() })
    }
}

/// Hyperparameters of the linear base learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L2 regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { lambda: 1e-3, epochs: 20, seed: 42 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), LearnError> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(LearnError::InvalidConfig(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.epochs == 0 {
            return Err(LearnError::InvalidConfig("epochs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Anything that maps a feature vector to a labelset. Deep models trained
/// elsewhere can be evaluated by implementing this trait.
pub trait MultilabelPredictor: Send + Sync {
    fn predict(&self, x: &FeatureVector) -> Result<SmellLabels, LearnError>;

    fn predict_all(&self, xs: &[FeatureVector]) -> Result<Vec<SmellLabels>, LearnError> {
        xs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Which learner to train.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LearnerSpec {
    Ovr(TrainConfig),
    Chain { config: TrainConfig, order: ChainOrder },
    Powerset(TrainConfig),
    Mlknn { k: usize, smoothing: f64 },
}

impl LearnerSpec {
    pub const DEFAULT_MLKNN_K: usize = 10;
    pub const DEFAULT_MLKNN_SMOOTHING: f64 = 1.0;

    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::Ovr(_) => "OVR-SVM",
            LearnerSpec::Chain { .. } => "CC-SVM",
            LearnerSpec::Powerset(_) => "LPS-SVM",
            LearnerSpec::Mlknn { .. } => "ML-kNN",
        }
    }

    /// Same learner with its randomness re-seeded.
    pub fn reseeded(self, seed: u64) -> Self {
        match self {
            LearnerSpec::Ovr(c) => LearnerSpec::Ovr(c.with_seed(seed)),
            LearnerSpec::Chain { config, order } => LearnerSpec::Chain { config: config.with_seed(seed), order },
            LearnerSpec::Powerset(c) => LearnerSpec::Powerset(c.with_seed(seed)),
            spec @ LearnerSpec::Mlknn { .. } => spec,
        }
    }
}

/// A trained multilabel model of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MultilabelModel {
    Ovr(OvrModel),
    Chain(ChainModel),
    Powerset(PowersetModel),
    Mlknn(MlknnModel),
}

impl MultilabelModel {
    pub fn type_name(&self) -> &'static str {
        match self {
            MultilabelModel::Ovr(_) => "ovr",
            MultilabelModel::Chain(_) => "cc",
            MultilabelModel::Powerset(_) => "lps",
            MultilabelModel::Mlknn(_) => "mlknn",
        }
    }
}

impl MultilabelPredictor for MultilabelModel {
    fn predict(&self, x: &FeatureVector) -> Result<SmellLabels, LearnError> {
        match self {
            MultilabelModel::Ovr(m) => m.predict(x),
            MultilabelModel::Chain(m) => m.predict(x),
            MultilabelModel::Powerset(m) => m.predict(x),
            MultilabelModel::Mlknn(m) => m.predict(x),
        }
    }
}

pub fn train(spec: &LearnerSpec, x: &[FeatureVector], y: &[SmellLabels]) -> Result<MultilabelModel, LearnError> {
    Ok(match *spec {
        LearnerSpec::Ovr(cfg) => MultilabelModel::Ovr(train_ovr(x, y, &cfg)?),
        LearnerSpec::Chain { config, order } => MultilabelModel::Chain(train_cc(x, y, &config, order)?),
        LearnerSpec::Powerset(cfg) => MultilabelModel::Powerset(train_lps(x, y, &cfg)?),
        LearnerSpec::Mlknn { k, smoothing } => MultilabelModel::Mlknn(train_mlknn(x, y, k, smoothing)?),
    })
}
