//! Percentile-threshold classifiers over [`MetricVector`]s.
//!
//! Each smell is flagged by comparing one or two metrics with thresholds fitted
//! on a training set:
//!
//! | smell         | rule                                                      |
//! |---------------|-----------------------------------------------------------|
//! | bloated       | `doc_length > bloated_len`                                |
//! | lazy          | `edit_distance <= lazy_edit`                              |
//! | excess struct | `struct_ref_count > excess_refs`                          |
//! | tangled       | `readability <= tangled_readability` or `jargon > tangled_jargon` |
//! | fragmented    | `url_count > fragmented_urls`                             |
//!
//! Upward rules are strict and downward rules inclusive. With nearest-rank
//! percentiles this makes the `p`-th percentile threshold flag exactly the
//! units beyond it: `x > P_p` selects the top `100 - p` percent of distinct
//! values and `x <= P_q` the bottom `q` percent.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::SmellLabels;
use crate::metrics::MetricVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RulesError {
    #[error("cannot fit thresholds on an empty set")]
    EmptyInput,
    #[error("percentile {0} outside [0, 100]")]
    PercentileOutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdSelector {
    Average,
    P25,
    P50,
    P75,
    P90,
}

impl ThresholdSelector {
    pub const ALL: [ThresholdSelector; 5] = [
        ThresholdSelector::Average,
        ThresholdSelector::P25,
        ThresholdSelector::P50,
        ThresholdSelector::P75,
        ThresholdSelector::P90,
    ];

    pub fn percentile(self) -> Option<f64> {
        match self {
            ThresholdSelector::Average => None,
            ThresholdSelector::P25 => Some(25.0),
            ThresholdSelector::P50 => Some(50.0),
            ThresholdSelector::P75 => Some(75.0),
            ThresholdSelector::P90 => Some(90.0),
        }
    }

    /// Row label in report tables (`AVG`, `25P`, ...).
    pub fn label(self) -> &'static str {
        match self {
            ThresholdSelector::Average => "AVG",
            ThresholdSelector::P25 => "25P",
            ThresholdSelector::P50 => "50P",
            ThresholdSelector::P75 => "75P",
            ThresholdSelector::P90 => "90P",
        }
    }
}

impl fmt::Display for ThresholdSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ThresholdSelector::Average => "average",
            ThresholdSelector::P25 => "p25",
            ThresholdSelector::P50 => "p50",
            ThresholdSelector::P75 => "p75",
            ThresholdSelector::P90 => "p90",
        };
        f.write_str(s)
    }
}

impl FromStr for ThresholdSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "average" | "avg" | "mean" => Ok(Self::Average),
            "p25" | "25p" | "25" => Ok(Self::P25),
            "p50" | "50p" | "50" => Ok(Self::P50),
            "p75" | "75p" | "75" => Ok(Self::P75),
            "p90" | "90p" | "90" => Ok(Self::P90),
            other => Err(format!("unknown threshold selector `{other}`")),
        }
    }
}

/// How percentile selectors are applied to the downward metrics
/// (`edit_distance` for lazy, `readability` for tangled).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Every metric uses the `p`-th percentile.
    #[default]
    Plain,
    /// Downward metrics use the `(100 - p)`-th percentile, so each selector
    /// flags a tail of the same size in every metric.
    Mirrored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub bloated_len: f64,
    pub lazy_edit: f64,
    pub excess_refs: f64,
    pub tangled_readability: f64,
    pub tangled_jargon: f64,
    pub fragmented_urls: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuleModel {
    pub selector: ThresholdSelector,
    #[serde(default)]
    pub orientation: Orientation,
    pub thresholds: Thresholds,
}

/// Nearest-rank percentile: the `ceil(p/100 * n)`-th smallest value, or the
/// smallest for `p = 0`.
pub fn percentile(values: &[f64], p: f64) -> Result<f64, RulesError> {
    if values.is_empty() {
        return Err(RulesError::EmptyInput);
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(RulesError::PercentileOutOfRange(p.to_string()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // p * n / 100 rather than p / 100 * n: 0.9 * 100 is not 90 in binary.
    let rank = ((p * n as f64) / 100.0).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

fn mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    values.iter().map(|v| v / n).sum()
}

fn column(metrics: &[MetricVector], idx: usize) -> Vec<f64> {
    metrics.iter().map(|m| m.as_array()[idx]).collect()
}

/// Fits thresholds with the default [`Orientation::Plain`].
pub fn fit_thresholds(metrics: &[MetricVector], selector: ThresholdSelector) -> Result<RuleModel, RulesError> {
    fit_thresholds_with(metrics, selector, Orientation::Plain)
}

pub fn fit_thresholds_with(
    metrics: &[MetricVector],
    selector: ThresholdSelector,
    orientation: Orientation,
) -> Result<RuleModel, RulesError> {
    if metrics.is_empty() {
        return Err(RulesError::EmptyInput);
    }
    let fit = |idx: usize, downward: bool| -> Result<f64, RulesError> {
        let values = column(metrics, idx);
        match selector.percentile() {
            None => Ok(mean(&values)),
            Some(p) if downward && orientation == Orientation::Mirrored => percentile(&values, 100.0 - p),
            Some(p) => percentile(&values, p),
        }
    };
    Ok(RuleModel {
        selector,
        orientation,
        thresholds: Thresholds {
            bloated_len: fit(0, false)?,
            tangled_readability: fit(1, true)?,
            tangled_jargon: fit(2, false)?,
            fragmented_urls: fit(3, false)?,
            excess_refs: fit(4, false)?,
            lazy_edit: fit(5, true)?,
        },
    })
}

pub fn classify(m: &MetricVector, model: &RuleModel) -> SmellLabels {
    let t = &model.thresholds;
    let [doc_length, _, jargon, urls, refs, edit] = m.as_array();
    SmellLabels {
        bloated: doc_length > t.bloated_len,
        lazy: edit <= t.lazy_edit,
        excess_struct: refs > t.excess_refs,
        // The raw sentinel, not the clamped value: empty text is never tangled
        // through readability.
        tangled: m.readability <= t.tangled_readability || jargon > t.tangled_jargon,
        fragmented: urls > t.fragmented_urls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::READABILITY_SENTINEL;
    use proptest::prelude::*;

    fn mv(doc_length: u32, edit_distance: u32) -> MetricVector {
        MetricVector {
            doc_length,
            readability: 60.0,
            jargon_count: 0,
            url_count: 0,
            struct_ref_count: 0,
            edit_distance,
        }
    }

    #[test]
    fn percentile_examples() {
        let hundred: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&hundred, 90.0).unwrap(), 90.0);
        assert_eq!(percentile(&hundred, 0.0).unwrap(), 1.0);
        assert_eq!(percentile(&hundred, 100.0).unwrap(), 100.0);
        assert_eq!(percentile(&[5.0], 37.0).unwrap(), 5.0);
        assert_eq!(percentile(&[3.0, 1.0, 2.0], 50.0).unwrap(), 2.0);
        assert_eq!(percentile(&[], 50.0), Err(RulesError::EmptyInput));
        assert!(percentile(&[1.0], 101.0).is_err());
    }

    #[test]
    fn fit_examples() {
        let metrics: Vec<_> = (1..=100).map(|v| mv(v, v)).collect();
        let model = fit_thresholds(&metrics, ThresholdSelector::P90).unwrap();
        assert_eq!(model.thresholds.bloated_len, 90.0);

        let mirrored = fit_thresholds_with(&metrics, ThresholdSelector::P25, Orientation::Mirrored).unwrap();
        assert_eq!(mirrored.thresholds.lazy_edit, 75.0);
        let plain = fit_thresholds(&metrics, ThresholdSelector::P25).unwrap();
        assert_eq!(plain.thresholds.lazy_edit, 25.0);

        assert_eq!(fit_thresholds(&[], ThresholdSelector::P50), Err(RulesError::EmptyInput));
    }

    #[test]
    fn single_vector_average() {
        let m = MetricVector {
            doc_length: 7,
            readability: 42.5,
            jargon_count: 2,
            url_count: 1,
            struct_ref_count: 3,
            edit_distance: 11,
        };
        let t = fit_thresholds(&[m], ThresholdSelector::Average).unwrap().thresholds;
        assert_eq!(
            [t.bloated_len, t.tangled_readability, t.tangled_jargon, t.fragmented_urls, t.excess_refs, t.lazy_edit],
            [7.0, 42.5, 2.0, 1.0, 3.0, 11.0]
        );
    }

    #[test]
    fn sentinel_keeps_thresholds_finite() {
        let mut empty = mv(0, 5);
        empty.readability = READABILITY_SENTINEL;
        let model = fit_thresholds(&[empty, empty], ThresholdSelector::Average).unwrap();
        assert!(model.thresholds.tangled_readability.is_finite());
        assert!(!classify(&empty, &model).tangled);
    }

    fn model_with(t: Thresholds) -> RuleModel {
        RuleModel { selector: ThresholdSelector::Average, orientation: Orientation::Plain, thresholds: t }
    }

    const NEUTRAL: Thresholds = Thresholds {
        bloated_len: 300.0,
        lazy_edit: 10.0,
        excess_refs: 5.0,
        tangled_readability: 20.0,
        tangled_jargon: 8.0,
        fragmented_urls: 2.0,
    };

    #[test]
    fn classify_examples() {
        let model = model_with(NEUTRAL);
        assert!(classify(&mv(500, 50), &model).bloated);
        assert!(classify(&mv(50, 2), &model).lazy);
        let clean = MetricVector {
            doc_length: 40,
            readability: 60.0,
            jargon_count: 1,
            url_count: 0,
            struct_ref_count: 1,
            edit_distance: 80,
        };
        assert_eq!(classify(&clean, &model), SmellLabels::NONE);

        let hard = MetricVector { readability: 10.0, ..clean };
        assert!(classify(&hard, &model).tangled);
        let jargon = MetricVector { jargon_count: 9, ..clean };
        assert!(classify(&jargon, &model).tangled);
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_value(model_with(NEUTRAL)).unwrap();
        assert_eq!(json["selector"], "average");
        assert_eq!(json["thresholds"].as_object().unwrap().len(), 6);
    }

    proptest! {
        #[test]
        fn p90_flags_top_decile(mut lens in proptest::collection::hash_set(0u32..10_000, 1..200)) {
            let lens: Vec<u32> = lens.drain().collect();
            let metrics: Vec<_> = lens.iter().map(|&l| mv(l, 0)).collect();
            let model = fit_thresholds(&metrics, ThresholdSelector::P90).unwrap();
            let flagged = metrics.iter().filter(|m| classify(m, &model).bloated).count();
            let n = metrics.len();
            let expected = n - (9 * n).div_ceil(10);
            prop_assert_eq!(flagged, expected);
            prop_assert_eq!(expected, n / 10);
        }

        #[test]
        fn monotone(len in 0u32..1000, edit in 0u32..1000, bump in 0u32..100) {
            let model = model_with(NEUTRAL);
            if classify(&mv(len, edit), &model).bloated {
                prop_assert!(classify(&mv(len + bump, edit), &model).bloated);
            }
            if classify(&mv(len, edit), &model).lazy {
                prop_assert!(classify(&mv(len, edit.saturating_sub(bump)), &model).lazy);
            }
        }

        #[test]
        fn fit_ignores_order(values in proptest::collection::vec((0u32..500, 0u32..500), 1..50), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let metrics: Vec<_> = values.iter().map(|&(a, b)| mv(a, b)).collect();
            let mut shuffled = metrics.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            for selector in ThresholdSelector::ALL {
                let a = fit_thresholds(&metrics, selector).unwrap();
                let b = fit_thresholds(&shuffled, selector).unwrap();
                if selector == ThresholdSelector::Average {
                    prop_assert!((a.thresholds.bloated_len - b.thresholds.bloated_len).abs() < 1e-9);
                    prop_assert!((a.thresholds.lazy_edit - b.thresholds.lazy_edit).abs() < 1e-9);
                } else {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
