//! Multilabel k-nearest neighbours with Bayesian label inference.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dim, LearnError, MultilabelPredictor};
use crate::corpus::{Smell, SmellLabels};
use crate::features::FeatureVector;

/// Rows up to this width are stored densely in model files.
const DENSE_STORAGE_MAX_DIM: usize = 64;

/// Training vectors as kept inside the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StoredVectors {
    Dense { dim: usize, rows: Vec<Vec<f64>> },
    Sparse(Vec<FeatureVector>),
}

impl StoredVectors {
    fn new(x: &[FeatureVector]) -> Self {
        let dim = x[0].dim();
        if dim <= DENSE_STORAGE_MAX_DIM {
            StoredVectors::Dense { dim, rows: x.iter().map(FeatureVector::to_dense).collect() }
        } else {
            StoredVectors::Sparse(x.to_vec())
        }
    }

    fn dim(&self) -> usize {
        match self {
            StoredVectors::Dense { dim, .. } => *dim,
            StoredVectors::Sparse(rows) => rows.first().map_or(0, FeatureVector::dim),
        }
    }

    fn len(&self) -> usize {
        match self {
            StoredVectors::Dense { rows, .. } => rows.len(),
            StoredVectors::Sparse(rows) => rows.len(),
        }
    }

    /// Squared distances from `query` to every row. Zero coordinates add
    /// nothing, so both layouts give bit-identical sums.
    fn distances(&self, query: &FeatureVector) -> Vec<f64> {
        match self {
            StoredVectors::Dense { rows, .. } => {
                let q = query.to_dense();
                rows.iter()
                    .map(|r| r.iter().zip(&q).map(|(a, b)| b - a).fold(0.0, |acc, d| acc + d * d))
                    .collect()
            }
            StoredVectors::Sparse(rows) => rows.iter().map(|r| query.squared_distance(r)).collect(),
        }
    }
}

/// Indices of the `k` smallest distances, ties broken by ascending index.
fn nearest(distances: &[f64], k: usize, exclude: Option<usize>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..distances.len()).filter(|&i| Some(i) != exclude).collect();
    let cmp = |a: &usize, b: &usize| distances[*a].total_cmp(&distances[*b]).then(a.cmp(b));
    if idx.len() > k {
        idx.select_nth_unstable_by(k, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlknnModel {
    pub k: usize,
    pub smoothing: f64,
    pub vectors: StoredVectors,
    pub labels: Vec<SmellLabels>,
    /// Prior probability of each smell.
    pub prior: [f64; 5],
    /// `c[l][j]`: positives for smell `l` with exactly `j` positive neighbours.
    pub c: [Vec<u32>; 5],
    /// `c_neg[l][j]`: the same count for negatives.
    pub c_neg: [Vec<u32>; 5],
}

pub fn train_mlknn(x: &[FeatureVector], y: &[SmellLabels], k: usize, smoothing: f64) -> Result<MlknnModel, LearnError> {
    if x.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(LearnError::LengthMismatch { features: x.len(), labels: y.len() });
    }
    if k == 0 {
        return Err(LearnError::InvalidConfig("k must be at least 1".into()));
    }
    if !(smoothing > 0.0 && smoothing.is_finite()) {
        return Err(LearnError::InvalidConfig(format!("smoothing must be positive, got {smoothing}")));
    }
    let m = x.len();
    if k >= m {
        return Err(LearnError::TooFewInstances { m, k });
    }
    let dim = x[0].dim();
    for xi in x {
        check_dim(dim, xi)?;
    }
    let vectors = StoredVectors::new(x);

    let mut prior = [0.0; 5];
    for smell in Smell::ALL {
        let positives = y.iter().filter(|l| l.get(smell)).count() as f64;
        prior[smell.index()] = (smoothing + positives) / (2.0 * smoothing + m as f64);
    }

    let neighbour_counts: Vec<[usize; 5]> = (0..m)
        .into_par_iter()
        .map(|i| {
            let near = nearest(&vectors.distances(&x[i]), k, Some(i));
            positives_among(&near, y)
        })
        .collect();

    let mut c: [Vec<u32>; 5] = std::array::from_fn(|_| vec![0; k + 1]);
    let mut c_neg: [Vec<u32>; 5] = std::array::from_fn(|_| vec![0; k + 1]);
    for (labels, counts) in y.iter().zip(&neighbour_counts) {
        for smell in Smell::ALL {
            let l = smell.index();
            let table = if labels.get(smell) { &mut c[l] } else { &mut c_neg[l] };
            table[counts[l]] += 1;
        }
    }

    Ok(MlknnModel { k, smoothing, vectors, labels: y.to_vec(), prior, c, c_neg })
}

fn positives_among(neighbours: &[usize], y: &[SmellLabels]) -> [usize; 5] {
    let mut counts = [0; 5];
    for &n in neighbours {
        for smell in Smell::ALL {
            counts[smell.index()] += usize::from(y[n].get(smell));
        }
    }
    counts
}

impl MlknnModel {
    pub fn dim(&self) -> usize {
        self.vectors.dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl MultilabelPredictor for MlknnModel {
    fn predict(&self, x: &FeatureVector) -> Result<SmellLabels, LearnError> {
        check_dim(self.dim(), x)?;
        let near = nearest(&self.vectors.distances(x), self.k, None);
        let counts = positives_among(&near, &self.labels);
        let s = self.smoothing;
        let denom_base = s * (self.k + 1) as f64;
        let mut out = SmellLabels::NONE;
        for smell in Smell::ALL {
            let l = smell.index();
            let cc = counts[l];
            let sum_pos: u32 = self.c[l].iter().sum();
            let sum_neg: u32 = self.c_neg[l].iter().sum();
            let like_pos = (s + self.c[l][cc] as f64) / (denom_base + sum_pos as f64);
            let like_neg = (s + self.c_neg[l][cc] as f64) / (denom_base + sum_neg as f64);
            let p1 = self.prior[l];
            out.set(smell, p1 * like_pos >= (1.0 - p1) * like_neg);
        }
        Ok(out)
    }
}
