//! Linear max-margin classifier trained by stochastic subgradient descent on
//! the primal hinge-loss objective.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_dim, LearnError, TrainConfig};
use crate::features::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn constant(dim: usize, positive: bool) -> Self {
        Self { weights: vec![0.0; dim], bias: if positive { 1.0 } else { -1.0 } }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn decision(&self, x: &FeatureVector) -> Result<f64, LearnError> {
        check_dim(self.dim(), x)?;
        Ok(x.dot_dense(&self.weights) + self.bias)
    }

    /// Positive on a non-negative decision value.
    pub fn predict(&self, x: &FeatureVector) -> Result<bool, LearnError> {
        Ok(self.decision(x)? >= 0.0)
    }

    /// `lambda/2 * (|w|^2 + b^2) + mean hinge loss`.
    pub fn objective(&self, x: &[FeatureVector], y: &[bool], lambda: f64) -> f64 {
        let reg = self.weights.iter().map(|w| w * w).sum::<f64>() + self.bias * self.bias;
        let hinge: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, &yi)| {
                let margin = sign(yi) * (xi.dot_dense(&self.weights) + self.bias);
                (1.0 - margin).max(0.0)
            })
            .sum();
        0.5 * lambda * reg + hinge / x.len() as f64
    }
}

fn sign(label: bool) -> f64 {
    if label {
        1.0
    } else {
        -1.0
    }
}

/// Trains on `(x, y)`.
///
/// Each epoch visits the examples once in an order shuffled by a generator
/// seeded from `cfg.seed`. Step `t` uses the rate `1/(lambda t)`. The bias is
/// an extra weight on a constant feature of 1 and is regularized with the
/// rest. The returned model is the average of all iterates. Training data
/// with a single class yields a constant classifier for that class.
pub fn train_linear(x: &[FeatureVector], y: &[bool], cfg: &TrainConfig) -> Result<LinearModel, LearnError> {
    let dim = validate(x, y, cfg)?;
    if y.iter().all(|&l| l == y[0]) {
        return Ok(LinearModel::constant(dim, y[0]));
    }
    let mut solver = Pegasos::new(dim, cfg.lambda);
    run_epochs(&mut solver, x, y, cfg, |_| {});
    Ok(solver.averaged())
}

fn validate(x: &[FeatureVector], y: &[bool], cfg: &TrainConfig) -> Result<usize, LearnError> {
    cfg.validate()?;
    if x.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(LearnError::LengthMismatch { features: x.len(), labels: y.len() });
    }
    let dim = x[0].dim();
    for xi in x {
        check_dim(dim, xi)?;
    }
    Ok(dim)
}

fn run_epochs(
    solver: &mut Pegasos,
    x: &[FeatureVector],
    y: &[bool],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&Pegasos),
) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..x.len()).collect();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            solver.step(&x[i], sign(y[i]));
        }
        on_epoch(solver);
    }
}

/// Solver state. The current iterate is `scale * v`, with the bias stored in
/// `v[dim]`. The running sum of iterates is kept as `offset + scale_sum * v`
/// so that sparse updates stay sparse.
struct Pegasos {
    lambda: f64,
    dim: usize,
    v: Vec<f64>,
    scale: f64,
    offset: Vec<f64>,
    scale_sum: f64,
    t: u64,
}

impl Pegasos {
    fn new(dim: usize, lambda: f64) -> Self {
        Self {
            lambda,
            dim,
            v: vec![0.0; dim + 1],
            scale: 1.0,
            offset: vec![0.0; dim + 1],
            scale_sum: 0.0,
            t: 0,
        }
    }

    fn step(&mut self, x: &FeatureVector, label: f64) {
        self.t += 1;
        let t = self.t as f64;
        let eta = 1.0 / (self.lambda * t);
        let margin = label * self.scale * (x.dot_dense(&self.v) + self.v[self.dim]);
        if self.t > 1 {
            self.scale *= 1.0 - 1.0 / t;
        }
        if margin < 1.0 {
            let coef = eta * label / self.scale;
            let bias_slot = std::iter::once((self.dim, 1.0));
            for (j, xj) in x.iter().chain(bias_slot) {
                let delta = coef * xj;
                self.v[j] += delta;
                self.offset[j] -= self.scale_sum * delta;
            }
        }
        self.scale_sum += self.scale;
        if self.scale < 1e-9 {
            for vj in &mut self.v {
                *vj *= self.scale;
            }
            self.scale_sum /= self.scale;
            self.scale = 1.0;
        }
    }

    fn averaged(&self) -> LinearModel {
        let t = self.t.max(1) as f64;
        let mut w: Vec<f64> = self
            .offset
            .iter()
            .zip(&self.v)
            .map(|(u, v)| (u + self.scale_sum * v) / t)
            .collect();
        let bias = w.pop().expect("bias slot");
        LinearModel { weights: w, bias }
    }

    #[cfg(test)]
    fn current(&self) -> LinearModel {
        let mut w: Vec<f64> = self.v.iter().map(|v| v * self.scale).collect();
        let bias = w.pop().expect("bias slot");
        LinearModel { weights: w, bias }
    }
}
