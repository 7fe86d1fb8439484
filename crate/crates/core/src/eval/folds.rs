//! Iterative stratification for multilabel k-fold splitting.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::corpus::{Smell, SmellLabels};

/// Fold index of every unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<usize>,
}

impl FoldAssignment {
    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(train, test)` unit indices for one fold, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.folds.len()).partition(|&i| self.folds[i] != fold)
    }
}

fn check(m: usize, k: usize) -> Result<(), EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidK(k));
    }
    if m < k {
        return Err(EvalError::TooFewInstances { m, k });
    }
    Ok(())
}

/// Greedy multilabel stratification.
///
/// Each fold wants `m/k` units and `m_l/k` positives of each smell `l`. The
/// smell with the fewest unassigned positives is handled first: each of its
/// units goes to the fold with the largest remaining quota for that smell,
/// then the largest remaining total quota, then a seeded random choice.
/// Units without any smell are placed last by total quota alone.
pub fn iterative_stratified_folds(y: &[SmellLabels], k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    let m = y.len();
    check(m, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total_quota = vec![m as f64 / k as f64; k];
    let mut label_quota: Vec<[f64; 5]> = {
        let mut per = [0.0; 5];
        for smell in Smell::ALL {
            per[smell.index()] = y.iter().filter(|l| l.get(smell)).count() as f64 / k as f64;
        }
        vec![per; k]
    };
    let mut folds = vec![usize::MAX; m];
    let mut remaining = [0usize; 5];
    for l in y {
        for smell in Smell::ALL {
            remaining[smell.index()] += usize::from(l.get(smell));
        }
    }

    let pick = |candidates: &[usize], rng: &mut ChaCha8Rng| -> usize {
        candidates[rng.gen_range(0..candidates.len())]
    };
    let argmax = |values: &mut dyn Iterator<Item = (usize, f64)>| -> Vec<usize> {
        let mut best = f64::NEG_INFINITY;
        let mut out = Vec::new();
        for (j, v) in values {
            if v > best {
                best = v;
                out.clear();
                out.push(j);
            } else if v == best {
                out.push(j);
            }
        }
        out
    };

    while let Some(smell) = Smell::ALL.into_iter().filter(|s| remaining[s.index()] > 0).min_by_key(|s| remaining[s.index()]) {
        let l = smell.index();
        let units: Vec<usize> = (0..m).filter(|&i| folds[i] == usize::MAX && y[i].get(smell)).collect();
        for i in units {
            let by_label = argmax(&mut (0..k).map(|j| (j, label_quota[j][l])));
            let tied = argmax(&mut by_label.iter().map(|&j| (j, total_quota[j])));
            let fold = pick(&tied, &mut rng);
            folds[i] = fold;
            total_quota[fold] -= 1.0;
            for s in Smell::ALL {
                if y[i].get(s) {
                    label_quota[fold][s.index()] -= 1.0;
                    remaining[s.index()] -= 1;
                }
            }
        }
    }
    for slot in folds.iter_mut().filter(|f| **f == usize::MAX) {
        let tied = argmax(&mut (0..k).map(|j| (j, total_quota[j])));
        let fold = pick(&tied, &mut rng);
        *slot = fold;
        total_quota[fold] -= 1.0;
    }
    Ok(FoldAssignment { k, seed, folds })
}

/// Shuffles the units and cuts them into `k` near-equal contiguous folds.
pub fn random_folds(m: usize, k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    check(m, k)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![0; m];
    for (pos, &i) in order.iter().enumerate() {
        folds[i] = pos * k / m;
    }
    Ok(FoldAssignment { k, seed, folds })
}

/// Mean over smells and folds of `|p_fl - p_l|`, where `p_fl` is the share of
/// positives for smell `l` inside fold `f` and `p_l` the share overall.
/// Smells without positives are skipped.
pub fn fold_deviation(y: &[SmellLabels], folds: &FoldAssignment) -> f64 {
    let sizes = folds.sizes();
    let mut total = 0.0;
    let mut terms = 0usize;
    for smell in Smell::ALL {
        let overall = y.iter().filter(|l| l.get(smell)).count();
        if overall == 0 {
            continue;
        }
        let p = overall as f64 / y.len() as f64;
        let mut per_fold = vec![0usize; folds.k];
        for (l, &f) in y.iter().zip(&folds.folds) {
            per_fold[f] += usize::from(l.get(smell));
        }
        for (count, size) in per_fold.iter().zip(&sizes) {
            if *size > 0 {
                total += (*count as f64 / *size as f64 - p).abs();
                terms += 1;
            }
        }
    }
    if terms == 0 {
        0.0
    } else {
        total / terms as f64
    }
}
