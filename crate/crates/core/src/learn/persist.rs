//! JSON model files.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{LearnError, MultilabelModel};
use crate::features::FeatureSpace;
use crate::rules::RuleModel;

/// On-disk envelope: `{model_type, feature_space, payload}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub model_type: String,
    pub feature_space: Option<FeatureSpace>,
    pub payload: Value,
}

/// A fitted detector of either family.
#[derive(Debug, Clone, PartialEq)]
pub enum SavedModel {
    Rules(RuleModel),
    Learned { space: FeatureSpace, model: MultilabelModel },
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("model types serialize to JSON")
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, LearnError> {
    serde_json::from_value(value).map_err(|e| LearnError::InvalidModelFile(e.to_string()))
}

impl SavedModel {
    pub fn model_type(&self) -> &'static str {
        match self {
            SavedModel::Rules(_) => "rules",
            SavedModel::Learned { model, .. } => model.type_name(),
        }
    }

    pub fn to_file(&self) -> ModelFile {
        let (feature_space, payload) = match self {
            SavedModel::Rules(rules) => (None, to_value(rules)),
            SavedModel::Learned { space, model } => {
                let payload = match model {
                    MultilabelModel::Ovr(m) => to_value(m),
                    MultilabelModel::Chain(m) => to_value(m),
                    MultilabelModel::Powerset(m) => to_value(m),
                    MultilabelModel::Mlknn(m) => to_value(m),
                };
                (Some(space.clone()), payload)
            }
        };
        ModelFile { model_type: self.model_type().to_owned(), feature_space, payload }
    }

    pub fn from_file(file: ModelFile) -> Result<Self, LearnError> {
        if file.model_type == "rules" {
            return from_value(file.payload).map(SavedModel::Rules);
        }
        let space = file
            .feature_space
            .ok_or_else(|| LearnError::InvalidModelFile(format!("{} model without feature_space", file.model_type)))?;
        let model = match file.model_type.as_str() {
            "ovr" => MultilabelModel::Ovr(from_value(file.payload)?),
            "cc" => MultilabelModel::Chain(from_value(file.payload)?),
            "lps" => MultilabelModel::Powerset(from_value(file.payload)?),
            "mlknn" => MultilabelModel::Mlknn(from_value(file.payload)?),
            other => return Err(LearnError::InvalidModelFile(format!("unknown model_type {other:?}"))),
        };
        Ok(SavedModel::Learned { space, model })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("model file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LearnError> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| LearnError::InvalidModelFile(e.to_string()))?;
        Self::from_file(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{unit, SmellLabels};
    use crate::features::FeatureKind;
    use crate::learn::{train, LearnerSpec, MultilabelPredictor, TrainConfig};
    use crate::metrics::{compute_metrics, Lexicon};
    use crate::rules::{fit_thresholds, ThresholdSelector};

    fn data() -> (Vec<crate::corpus::DocUnit>, Vec<crate::metrics::MetricVector>, Vec<SmellLabels>) {
        let lex = Lexicon::default_english();
        let units: Vec<_> = (0..12)
            .map(|i| {
                let text = if i % 2 == 0 { "Returns the size of the list." } else { "See http://x.org and Foo.bar() for details." };
                unit(&format!("u{i}"), "void f()", text)
            })
            .collect();
        let metrics: Vec<_> = units.iter().map(|u| compute_metrics(u, &lex)).collect();
        let labels = (0..12).map(|i| SmellLabels { fragmented: i % 2 == 1, ..SmellLabels::NONE }).collect();
        (units, metrics, labels)
    }

    #[test]
    fn rules_round_trip() {
        let (_, metrics, _) = data();
        let saved = SavedModel::Rules(fit_thresholds(&metrics, ThresholdSelector::P75).unwrap());
        let back = SavedModel::from_json(&saved.to_json()).unwrap();
        assert_eq!(back, saved);
    }

    #[test]
    fn learned_round_trips() {
        let (units, metrics, labels) = data();
        let refs: Vec<_> = units.iter().collect();
        for kind in [FeatureKind::Rules, FeatureKind::bow()] {
            let space = FeatureSpace::fit(kind, &refs, &metrics).unwrap();
            let x: Vec<_> = units.iter().zip(&metrics).map(|(u, m)| space.transform(u, m).unwrap()).collect();
            let cfg = TrainConfig::default();
            for spec in [
                LearnerSpec::Ovr(cfg),
                LearnerSpec::Chain { config: cfg, order: Default::default() },
                LearnerSpec::Powerset(cfg),
                LearnerSpec::Mlknn { k: 3, smoothing: 1.0 },
            ] {
                let model = train(&spec, &x, &labels).unwrap();
                let saved = SavedModel::Learned { space: space.clone(), model };
                let back = SavedModel::from_json(&saved.to_json()).unwrap();
                assert_eq!(back, saved);
                if let SavedModel::Learned { model, .. } = &back {
                    assert_eq!(model.predict_all(&x).unwrap().len(), x.len());
                }
            }
        }
    }

    #[test]
    fn rejects_bad_files() {
        let bad = ModelFile { model_type: "svm-rbf".into(), feature_space: None, payload: Value::Null };
        assert!(matches!(SavedModel::from_file(bad), Err(LearnError::InvalidModelFile(_))));
        let missing = ModelFile { model_type: "ovr".into(), feature_space: None, payload: Value::Null };
        assert!(matches!(SavedModel::from_file(missing), Err(LearnError::InvalidModelFile(_))));
        assert!(SavedModel::from_json("not json").is_err());
    }
}
