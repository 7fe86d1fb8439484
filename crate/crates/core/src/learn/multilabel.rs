//! Problem-transformation decompositions over the linear base learner.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_dim, train_linear, LearnError, LinearModel, MultilabelPredictor, TrainConfig};
use crate::corpus::{Smell, SmellLabels};
use crate::features::FeatureVector;

fn check_rows(x: &[FeatureVector], y: &[SmellLabels]) -> Result<usize, LearnError> {
    if x.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    if x.len() != y.len() {
        return Err(LearnError::LengthMismatch { features: x.len(), labels: y.len() });
    }
    Ok(x[0].dim())
}

fn column(y: &[SmellLabels], smell: Smell) -> Vec<bool> {
    y.iter().map(|l| l.get(smell)).collect()
}

/// One independent binary model per smell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvrModel {
    /// Indexed by [`Smell::index`].
    pub models: Vec<LinearModel>,
}

pub fn train_ovr(x: &[FeatureVector], y: &[SmellLabels], cfg: &TrainConfig) -> Result<OvrModel, LearnError> {
    check_rows(x, y)?;
    let models = Smell::ALL
        .par_iter()
        .map(|&smell| train_linear(x, &column(y, smell), cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OvrModel { models })
}

impl OvrModel {
    pub fn decisions(&self, x: &FeatureVector) -> Result<[f64; 5], LearnError> {
        let mut out = [0.0; 5];
        for (slot, model) in out.iter_mut().zip(&self.models) {
            *slot = model.decision(x)?;
        }
        Ok(out)
    }
}

impl MultilabelPredictor for OvrModel {
    fn predict(&self, x: &FeatureVector) -> Result<SmellLabels, LearnError> {
        Ok(SmellLabels::from_array(self.decisions(x)?.map(|d| d >= 0.0)))
    }
}

/// Order in which chain links are trained.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChainOrder {
    /// Canonical label order: bloated, lazy, excess struct, tangled, fragmented.
    #[default]
    Fixed,
    Random { seed: u64 },
}

impl ChainOrder {
    pub fn resolve(self) -> Vec<Smell> {
        let mut order = Smell::ALL.to_vec();
        if let ChainOrder::Random { seed } = self {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        order
    }
}

/// Link `i` sees the features followed by the 0/1 values of links `0..i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub order: Vec<Smell>,
    pub links: Vec<LinearModel>,
}

fn augment(x: &FeatureVector, previous: &[bool]) -> FeatureVector {
    let extra: Vec<f64> = previous.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    x.concat(&FeatureVector::from_dense(&extra))
}

pub fn train_cc(
    x: &[FeatureVector],
    y: &[SmellLabels],
    cfg: &TrainConfig,
    order: ChainOrder,
) -> Result<ChainModel, LearnError> {
    check_rows(x, y)?;
    let order = order.resolve();
    let mut links = Vec::with_capacity(order.len());
    for (pos, &smell) in order.iter().enumerate() {
        let augmented: Vec<FeatureVector> = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| {
                let gold: Vec<bool> = order[..pos].iter().map(|&s| yi.get(s)).collect();
                augment(xi, &gold)
            })
            .collect();
        links.push(train_linear(&augmented, &column(y, smell), cfg)?);
    }
    Ok(ChainModel { order, links })
}

impl MultilabelPredictor for ChainModel {
    fn predict(&self, x: &FeatureVector) -> Result<SmellLabels, LearnError> {
        check_dim(self.links[0].dim(), x)?;
        let mut labels = SmellLabels::NONE;
        let mut predicted = Vec::with_capacity(self.order.len());
        for (&smell, link) in self.order.iter().zip(&self.links) {
            let value = link.predict(&augment(x, &predicted))?;
            labels.set(smell, value);
            predicted.push(value);
        }
        Ok(labels)
    }
}

/// One class per labelset observed in training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowersetModel {
    /// `(labelset encoding, one-vs-rest model)`, ascending by encoding.
    pub classes: Vec<(u8, LinearModel)>,
}

pub fn train_lps(x: &[FeatureVector], y: &[SmellLabels], cfg: &TrainConfig) -> Result<PowersetModel, LearnError> {
    check_rows(x, y)?;
    let codes: Vec<u8> = y.iter().map(|l| l.encode()).collect();
    let observed: BTreeSet<u8> = codes.iter().copied().collect();
    let classes = observed
        .into_par_iter()
        .map(|class| {
            let target: Vec<bool> = codes.iter().map(|&c| c == class).collect();
            train_linear(x, &target, cfg).map(|m| (class, m))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PowersetModel { classes })
}

impl PowersetModel {
    pub fn labelsets(&self) -> impl Iterator<Item = SmellLabels> + '_ {
        self.classes.iter().map(|&(c, _)| SmellLabels::decode(c))
    }
}

impl MultilabelPredictor for PowersetModel {
    /// Labelset with the largest decision value; ties go to the smallest
    /// encoding.
    fn predict(&self, x: &FeatureVector) -> Result<SmellLabels, LearnError> {
        let mut best: Option<(u8, f64)> = None;
        for (code, model) in &self.classes {
            let d = model.decision(x)?;
            if best.is_none_or(|(_, b)| d > b) {
                best = Some((*code, d));
            }
        }
        let (code, _) = best.ok_or(LearnError::EmptyTrainingSet)?;
        Ok(SmellLabels::decode(code))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> TrainConfig {
        TrainConfig { lambda: 0.01, epochs: 50, seed: 7 }
    }

    fn lbl(code: u8) -> SmellLabels {
        SmellLabels::decode(code)
    }

    #[test]
    fn ovr_tie_rule_and_signs() {
        let zero = OvrModel { models: vec![LinearModel { weights: vec![0.0; 2], bias: 0.0 }; 5] };
        let x = FeatureVector::from_dense(&[1.0, -1.0]);
        assert_eq!(zero.predict(&x).unwrap(), lbl(0b11111));
        let pos = OvrModel { models: vec![LinearModel { weights: vec![1.0, 0.0], bias: 0.5 }; 5] };
        assert_eq!(pos.predict(&x).unwrap(), lbl(0b11111));
        let neg = OvrModel { models: vec![LinearModel { weights: vec![-1.0, 0.0], bias: -0.5 }; 5] };
        assert_eq!(neg.predict(&x).unwrap(), SmellLabels::NONE);
        assert!(matches!(neg.predict(&FeatureVector::zeros(3)), Err(LearnError::DimensionMismatch { .. })));
    }

    #[test]
    fn chain_dimensions_grow() {
        let x: Vec<_> = (0..10).map(|i| FeatureVector::from_dense(&[i as f64, 1.0])).collect();
        let y: Vec<_> = (0..10).map(|i| lbl((i * 7 % 32) as u8)).collect();
        let chain = train_cc(&x, &y, &cfg(), ChainOrder::Fixed).unwrap();
        let dims: Vec<_> = chain.links.iter().map(LinearModel::dim).collect();
        assert_eq!(dims, [2, 3, 4, 5, 6]);
        assert!(matches!(train_cc(&[], &[], &cfg(), ChainOrder::Fixed), Err(LearnError::EmptyTrainingSet)));
    }

    #[test]
    fn chain_uses_previous_label() {
        // lazy copies bloated; the features carry no signal about either.
        let x: Vec<_> = (0..40).map(|i| FeatureVector::from_dense(&[((i * 13) % 5) as f64 * 0.01])).collect();
        let y: Vec<_> = (0..40)
            .map(|i| {
                let b = (i * 7) % 3 == 0;
                SmellLabels { bloated: b, lazy: b, ..SmellLabels::NONE }
            })
            .collect();
        let chain = train_cc(&x, &y, &TrainConfig { lambda: 0.01, epochs: 100, seed: 3 }, ChainOrder::Fixed).unwrap();
        let link = &chain.links[1];
        let correct = x
            .iter()
            .zip(&y)
            .filter(|(xi, yi)| link.predict(&augment(xi, &[yi.bloated])).unwrap() == yi.lazy)
            .count();
        assert_eq!(correct, x.len());
    }

    #[test]
    fn random_chain_order_is_permutation() {
        let order = ChainOrder::Random { seed: 9 }.resolve();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(sorted, Smell::ALL.to_vec());
        assert_eq!(order, ChainOrder::Random { seed: 9 }.resolve());
    }

    #[test]
    fn powerset_closure() {
        let a = lbl(0b10000);
        let b = lbl(0b01000);
        let x: Vec<_> = (0..20).map(|i| FeatureVector::from_dense(&[i as f64 - 10.0])).collect();
        let y: Vec<_> = (0..20).map(|i| if i < 10 { a } else { b }).collect();
        let model = train_lps(&x, &y, &cfg()).unwrap();
        for v in -30..30 {
            let p = model.predict(&FeatureVector::from_dense(&[v as f64])).unwrap();
            assert!(p == a || p == b);
        }
    }

    #[test]
    fn powerset_single_labelset() {
        let x: Vec<_> = (0..5).map(|i| FeatureVector::from_dense(&[i as f64])).collect();
        let model = train_lps(&x, &[lbl(0b00101); 5], &cfg()).unwrap();
        assert_eq!(model.predict(&FeatureVector::from_dense(&[-100.0])).unwrap(), lbl(0b00101));
    }

    #[test]
    fn powerset_all_combinations() {
        let x: Vec<_> = (0..32).map(|i| FeatureVector::from_dense(&[i as f64])).collect();
        let y: Vec<_> = (0..32u8).map(lbl).collect();
        let model = train_lps(&x, &y, &TrainConfig { epochs: 2, ..cfg() }).unwrap();
        assert_eq!(model.classes.len(), 32);
    }

    #[test]
    fn powerset_tie_prefers_smallest_encoding() {
        let flat = LinearModel { weights: vec![0.0], bias: 0.0 };
        let model = PowersetModel { classes: vec![(3, flat.clone()), (17, flat)] };
        assert_eq!(model.predict(&FeatureVector::from_dense(&[1.0])).unwrap(), lbl(3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn ovr_label_isolation(codes in proptest::collection::vec(0u8..32, 8..20), perm_seed in any::<u64>()) {
            let x: Vec<_> = codes.iter().enumerate()
                .map(|(i, &c)| FeatureVector::from_dense(&[c as f64 / 8.0, (i % 3) as f64]))
                .collect();
            let y: Vec<_> = codes.iter().map(|&c| lbl(c)).collect();
            // Shuffle every label column except bloated.
            let mut permuted = y.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
            for smell in &Smell::ALL[1..] {
                let mut col = column(&y, *smell);
                col.shuffle(&mut rng);
                for (row, v) in permuted.iter_mut().zip(col) {
                    row.set(*smell, v);
                }
            }
            let a = train_ovr(&x, &y, &cfg()).unwrap();
            let b = train_ovr(&x, &permuted, &cfg()).unwrap();
            prop_assert_eq!(&a.models[0], &b.models[0]);
        }

        #[test]
        fn powerset_predictions_are_observed(codes in proptest::collection::vec(0u8..32, 4..16), q in -5.0f64..5.0) {
            let x: Vec<_> = codes.iter().enumerate()
                .map(|(i, &c)| FeatureVector::from_dense(&[c as f64 / 16.0 - 1.0, i as f64 / 10.0]))
                .collect();
            let y: Vec<_> = codes.iter().map(|&c| lbl(c)).collect();
            let model = train_lps(&x, &y, &TrainConfig { epochs: 5, ..cfg() }).unwrap();
            let p = model.predict(&FeatureVector::from_dense(&[q, -q])).unwrap();
            prop_assert!(codes.contains(&p.encode()));
        }
    }
}
