//! Permutation feature importance.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_lengths, EvalError, SmellScores};
use crate::corpus::{Smell, SmellLabels};
use crate::features::FeatureVector;
use crate::learn::MultilabelPredictor;

pub const DEFAULT_REPEATS: usize = 10;

/// Drop in F1 when one feature column is shuffled. Positive means the model
/// relied on the feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: usize,
    pub name: String,
    pub baseline_macro_f1: f64,
    pub delta_macro_f1: f64,
    /// Indexed by [`Smell::index`].
    pub delta_f1: [f64; 5],
}

fn f1s(scores: &SmellScores) -> [f64; 5] {
    Smell::ALL.map(|s| scores.get(s).f1)
}

/// Shuffles column `feature` of `x` `repeats` times and reports the mean F1
/// drop against the unshuffled predictions.
pub fn permutation_importance(
    model: &dyn MultilabelPredictor,
    x: &[FeatureVector],
    y: &[SmellLabels],
    feature: usize,
    repeats: usize,
    seed: u64,
) -> Result<FeatureImportance, EvalError> {
    check_lengths(x.len(), y.len())?;
    if repeats == 0 {
        return Err(EvalError::InvalidRepeats);
    }
    let dim = x[0].dim();
    if feature >= dim {
        return Err(EvalError::BadFeatureIndex { index: feature, dim });
    }
    let baseline = SmellScores::compute(y, &model.predict_all(x)?)?;
    let base_f1 = f1s(&baseline);
    let base_macro = baseline.macro_f1();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut column: Vec<f64> = x.iter().map(|v| v.get(feature)).collect();
    let mut delta_f1 = [0.0; 5];
    let mut delta_macro = 0.0;
    for _ in 0..repeats {
        column.shuffle(&mut rng);
        let shuffled: Vec<FeatureVector> = x.iter().zip(&column).map(|(v, &c)| v.with_value(feature, c)).collect();
        let scores = SmellScores::compute(y, &model.predict_all(&shuffled)?)?;
        // Accumulate differences so an unchanged score gives exactly zero.
        for (d, (b, s)) in delta_f1.iter_mut().zip(base_f1.iter().zip(f1s(&scores))) {
            *d += b - s;
        }
        delta_macro += base_macro - scores.macro_f1();
    }
    let r = repeats as f64;
    Ok(FeatureImportance {
        feature,
        name: format!("f{feature}"),
        baseline_macro_f1: base_macro,
        delta_macro_f1: delta_macro / r,
        delta_f1: delta_f1.map(|d| d / r),
    })
}
