//! k-fold cross-validation of rule and learned detectors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{iterative_stratified_folds, permutation_importance, EvalError, FeatureImportance, FoldAssignment, SmellScores};
use crate::corpus::{Corpus, DocUnit, SmellLabels};
use crate::features::{FeatureKind, FeatureSpace, FeatureVector};
use crate::learn::{train, LearnerSpec, MultilabelModel, MultilabelPredictor};
use crate::metrics::{compute_metrics, Lexicon, MetricVector};
use crate::rules::{classify, fit_thresholds_with, Orientation, ThresholdSelector};

/// What to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ModelSpec {
    Rules { selector: ThresholdSelector, orientation: Orientation },
    Learner(LearnerSpec),
}

impl ModelSpec {
    pub fn rules(selector: ThresholdSelector) -> Self {
        ModelSpec::Rules { selector, orientation: Orientation::Plain }
    }

    pub fn name(&self) -> String {
        match self {
            ModelSpec::Rules { selector, orientation: Orientation::Plain } => format!("Rules@{}", selector.label()),
            ModelSpec::Rules { selector, orientation: Orientation::Mirrored } => {
                format!("Rules@{} (mirrored)", selector.label())
            }
            ModelSpec::Learner(spec) => spec.name().to_owned(),
        }
    }
}

/// A labeled corpus with its metrics computed once.
#[derive(Debug, Clone)]
pub struct CvInput<'a> {
    units: &'a [DocUnit],
    labels: &'a [SmellLabels],
    metrics: Vec<MetricVector>,
}

impl<'a> CvInput<'a> {
    pub fn new(corpus: &'a Corpus, lexicon: &Lexicon) -> Result<Self, EvalError> {
        let metrics = corpus.units().par_iter().map(|u| compute_metrics(u, lexicon)).collect();
        Self::with_metrics(corpus, metrics)
    }

    pub fn with_metrics(corpus: &'a Corpus, metrics: Vec<MetricVector>) -> Result<Self, EvalError> {
        let labels = corpus.require_labels()?;
        if metrics.len() != labels.len() {
            return Err(EvalError::LengthMismatch { left: labels.len(), right: metrics.len() });
        }
        Ok(Self { units: corpus.units(), labels, metrics })
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn labels(&self) -> &[SmellLabels] {
        self.labels
    }

    pub fn metrics(&self) -> &[MetricVector] {
        &self.metrics
    }

    fn fit_space(&self, kind: FeatureKind, idx: &[usize]) -> Result<FeatureSpace, EvalError> {
        let units: Vec<&DocUnit> = idx.iter().map(|&i| &self.units[i]).collect();
        let metrics: Vec<MetricVector> = idx.iter().map(|&i| self.metrics[i]).collect();
        Ok(FeatureSpace::fit(kind, &units, &metrics)?)
    }

    fn vectors(&self, space: &FeatureSpace, idx: &[usize]) -> Result<Vec<FeatureVector>, EvalError> {
        idx.iter()
            .map(|&i| space.transform(&self.units[i], &self.metrics[i]).map_err(EvalError::from))
            .collect()
    }

    fn gold(&self, idx: &[usize]) -> Vec<SmellLabels> {
        idx.iter().map(|&i| self.labels[i]).collect()
    }

    fn train_fold(
        &self,
        kind: FeatureKind,
        spec: &LearnerSpec,
        train_idx: &[usize],
    ) -> Result<(FeatureSpace, MultilabelModel), EvalError> {
        let space = self.fit_space(kind, train_idx)?;
        let x = self.vectors(&space, train_idx)?;
        let model = train(spec, &x, &self.gold(train_idx))?;
        Ok((space, model))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub scores: SmellScores,
}

/// Cross-validation outcome for one (model, features) pair. `mean` is the
/// unweighted mean of the fold scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub features: String,
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<FoldResult>,
    pub mean: SmellScores,
    pub macro_f1: f64,
}

fn seed_for_fold(seed: u64, fold: usize) -> u64 {
    seed.wrapping_add(fold as u64)
}

/// Folds come from iterative stratification under `seed`. Feature spaces and
/// thresholds are fitted on each training portion only.
pub fn cross_validate(
    input: &CvInput<'_>,
    features: FeatureKind,
    model: &ModelSpec,
    k: usize,
    seed: u64,
) -> Result<EvalReport, EvalError> {
    let assignment = iterative_stratified_folds(input.labels, k, seed)?;
    let folds = (0..k)
        .into_par_iter()
        .map(|fold| run_fold(input, features, model, &assignment, fold, seed))
        .collect::<Result<Vec<_>, _>>()?;
    let scores: Vec<SmellScores> = folds.iter().map(|f| f.scores).collect();
    let mean = SmellScores::mean(&scores).ok_or(EvalError::EmptyInput)?;
    let features = match model {
        ModelSpec::Rules { .. } => "metrics".to_owned(),
        ModelSpec::Learner(_) => features.name().to_owned(),
    };
    Ok(EvalReport { model: model.name(), features, k, seed, folds, macro_f1: mean.macro_f1(), mean })
}

fn run_fold(
    input: &CvInput<'_>,
    kind: FeatureKind,
    model: &ModelSpec,
    assignment: &FoldAssignment,
    fold: usize,
    seed: u64,
) -> Result<FoldResult, EvalError> {
    let (train_idx, test_idx) = assignment.split(fold);
    let predicted = match model {
        ModelSpec::Rules { selector, orientation } => {
            let train_metrics: Vec<MetricVector> = train_idx.iter().map(|&i| input.metrics[i]).collect();
            let rules = fit_thresholds_with(&train_metrics, *selector, *orientation)?;
            test_idx.iter().map(|&i| classify(&input.metrics[i], &rules)).collect()
        }
        ModelSpec::Learner(spec) => {
            let spec = spec.reseeded(seed_for_fold(seed, fold));
            let (space, trained) = input.train_fold(kind, &spec, &train_idx)?;
            trained.predict_all(&input.vectors(&space, &test_idx)?)?
        }
    };
    Ok(FoldResult {
        fold,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        scores: SmellScores::compute(&input.gold(&test_idx), &predicted)?,
    })
}

/// Permutation importance of the six metric columns, measured on each held-out
/// fold and averaged over folds. Needs a feature kind that contains the
/// metric columns at fixed positions.
pub fn cv_importance(
    input: &CvInput<'_>,
    features: FeatureKind,
    learner: &LearnerSpec,
    k: usize,
    seed: u64,
    repeats: usize,
) -> Result<Vec<FeatureImportance>, EvalError> {
    if matches!(features, FeatureKind::Bow { .. }) {
        return Err(EvalError::UnsupportedFeatures(features.name()));
    }
    let assignment = iterative_stratified_folds(input.labels, k, seed)?;
    let per_fold = (0..k)
        .into_par_iter()
        .map(|fold| {
            let (train_idx, test_idx) = assignment.split(fold);
            let spec = learner.reseeded(seed_for_fold(seed, fold));
            let (space, model) = input.train_fold(features, &spec, &train_idx)?;
            let x = input.vectors(&space, &test_idx)?;
            let y = input.gold(&test_idx);
            let names = space.feature_names();
            (0..MetricVector::NAMES.len())
                .map(|f| {
                    let mut imp = permutation_importance(&model, &x, &y, f, repeats, seed_for_fold(seed, fold))?;
                    imp.name = names[f].clone();
                    Ok(imp)
                })
                .collect::<Result<Vec<_>, EvalError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let n = per_fold.len() as f64;
    let mut out = per_fold[0].clone();
    for (f, item) in out.iter_mut().enumerate() {
        item.baseline_macro_f1 = per_fold.iter().map(|r| r[f].baseline_macro_f1).sum::<f64>() / n;
        item.delta_macro_f1 = per_fold.iter().map(|r| r[f].delta_macro_f1).sum::<f64>() / n;
        for s in 0..5 {
            item.delta_f1[s] = per_fold.iter().map(|r| r[f].delta_f1[s]).sum::<f64>() / n;
        }
    }
    Ok(out)
}
