//! Per-label and whole-labelset scores.

use serde::{Deserialize, Serialize};

use super::{check_lengths, EvalError};
use crate::corpus::{Smell, SmellLabels};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionCounts {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut c = Self::default();
        for (truth, pred) in pairs {
            match (truth, pred) {
                (true, true) => c.tp += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
                (true, false) => c.fn_ += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Scores with every zero denominator mapped to 0.
    pub fn scores(&self) -> LabelScores {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(self.tp, self.tp + self.fp);
        let recall = ratio(self.tp, self.tp + self.fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        LabelScores { accuracy: ratio(self.tp + self.tn, self.total()), precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl LabelScores {
    fn mean(items: &[LabelScores]) -> LabelScores {
        let n = items.len() as f64;
        let avg = |f: fn(&LabelScores) -> f64| items.iter().map(f).sum::<f64>() / n;
        LabelScores {
            accuracy: avg(|s| s.accuracy),
            precision: avg(|s| s.precision),
            recall: avg(|s| s.recall),
            f1: avg(|s| s.f1),
        }
    }
}

pub fn label_metrics(y_true: &[bool], y_pred: &[bool]) -> Result<(LabelScores, ConfusionCounts), EvalError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let counts = ConfusionCounts::from_pairs(y_true.iter().copied().zip(y_pred.iter().copied()));
    Ok((counts.scores(), counts))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MultilabelScores {
    /// Exact match ratio.
    pub emr: f64,
    pub hamming_loss: f64,
}

pub fn multilabel_metrics(y_true: &[SmellLabels], y_pred: &[SmellLabels]) -> Result<MultilabelScores, EvalError> {
    check_lengths(y_true.len(), y_pred.len())?;
    let n = y_true.len();
    let exact = y_true.iter().zip(y_pred).filter(|(t, p)| t == p).count();
    let wrong: usize = y_true.iter().zip(y_pred).map(|(t, p)| (t.encode() ^ p.encode()).count_ones() as usize).sum();
    Ok(MultilabelScores { emr: exact as f64 / n as f64, hamming_loss: wrong as f64 / (n * 5) as f64 })
}

/// Everything measured on one set of predictions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SmellScores {
    pub bloated: LabelScores,
    pub lazy: LabelScores,
    pub excess_struct: LabelScores,
    pub tangled: LabelScores,
    pub fragmented: LabelScores,
    pub emr: f64,
    pub hamming_loss: f64,
}

impl SmellScores {
    pub fn compute(y_true: &[SmellLabels], y_pred: &[SmellLabels]) -> Result<Self, EvalError> {
        let ml = multilabel_metrics(y_true, y_pred)?;
        let mut out = SmellScores { emr: ml.emr, hamming_loss: ml.hamming_loss, ..Default::default() };
        for smell in Smell::ALL {
            let counts = ConfusionCounts::from_pairs(y_true.iter().zip(y_pred).map(|(t, p)| (t.get(smell), p.get(smell))));
            *out.get_mut(smell) = counts.scores();
        }
        Ok(out)
    }

    pub fn get(&self, smell: Smell) -> &LabelScores {
        match smell {
            Smell::Bloated => &self.bloated,
            Smell::Lazy => &self.lazy,
            Smell::ExcessStruct => &self.excess_struct,
            Smell::Tangled => &self.tangled,
            Smell::Fragmented => &self.fragmented,
        }
    }

    pub fn get_mut(&mut self, smell: Smell) -> &mut LabelScores {
        match smell {
            Smell::Bloated => &mut self.bloated,
            Smell::Lazy => &mut self.lazy,
            Smell::ExcessStruct => &mut self.excess_struct,
            Smell::Tangled => &mut self.tangled,
            Smell::Fragmented => &mut self.fragmented,
        }
    }

    /// Unweighted mean F1 over the five smells.
    pub fn macro_f1(&self) -> f64 {
        Smell::ALL.iter().map(|&s| self.get(s).f1).sum::<f64>() / 5.0
    }

    /// Component-wise mean; `None` for an empty slice.
    pub fn mean(items: &[SmellScores]) -> Option<SmellScores> {
        if items.is_empty() {
            return None;
        }
        let n = items.len() as f64;
        let mut out = SmellScores {
            emr: items.iter().map(|s| s.emr).sum::<f64>() / n,
            hamming_loss: items.iter().map(|s| s.hamming_loss).sum::<f64>() / n,
            ..Default::default()
        };
        for smell in Smell::ALL {
            let per: Vec<LabelScores> = items.iter().map(|s| *s.get(smell)).collect();
            *out.get_mut(smell) = LabelScores::mean(&per);
        }
        Some(out)
    }
}
