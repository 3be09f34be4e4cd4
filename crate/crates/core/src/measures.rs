//! The fairness-rate family: GC-based rates, their cubed variants, and the
//! discard-gap rate. Every rate lies in `[0, 1]` and higher means fairer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregate::{lwm_aggregate, mean_aggregate, median_aggregate};
use crate::discard::{mdg_for, ThresholdMode};
use crate::error::{Error, Result};
use crate::gini::gini_coefficient;
use crate::scores::GroupedScores;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "mean-gc-sqfr")]
    MeanGcSqfr,
    #[serde(rename = "median-gc-sqfr")]
    MedianGcSqfr,
    #[serde(rename = "mean-gc-csqfr")]
    MeanGcCsqfr,
    #[serde(rename = "lwm-gc-sqfr")]
    LwmGcSqfr,
    #[serde(rename = "lwm-gc-csqfr")]
    LwmGcCsqfr,
    #[serde(rename = "mdg-sqfr")]
    MdgSqfr,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::MeanGcSqfr,
        Measure::MedianGcSqfr,
        Measure::MeanGcCsqfr,
        Measure::LwmGcSqfr,
        Measure::LwmGcCsqfr,
        Measure::MdgSqfr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::MeanGcSqfr => "mean-gc-sqfr",
            Measure::MedianGcSqfr => "median-gc-sqfr",
            Measure::MeanGcCsqfr => "mean-gc-csqfr",
            Measure::LwmGcSqfr => "lwm-gc-sqfr",
            Measure::LwmGcCsqfr => "lwm-gc-csqfr",
            Measure::MdgSqfr => "mdg-sqfr",
        }
    }

    pub fn is_gini_based(self) -> bool {
        !matches!(self, Measure::MdgSqfr)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// Accepts the hyphenated names, their snake_case spellings, and the short
    /// form `lwm-csqfr` for `lwm-gc-csqfr`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        if norm == "lwm-csqfr" {
            return Ok(Measure::LwmGcCsqfr);
        }
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown measure '{s}' (expected one of: {})",
                    Measure::ALL.map(Measure::name).join(", ")
                ))
            })
    }
}

/// A fairness rate tagged with the measure that produced it. The value is in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FairnessScore {
    pub measure: Measure,
    pub value: f64,
}

fn check_gc(gc: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gc) {
        Ok(())
    } else {
        Err(Error::Domain(format!("Gini coefficient must lie in [0, 1], got {gc}")))
    }
}

/// `1 - gc`
pub fn sqfr(gc: f64) -> Result<f64> {
    check_gc(gc)?;
    Ok(1.0 - gc)
}

/// `(1 - gc)^3`
pub fn csqfr(gc: f64) -> Result<f64> {
    check_gc(gc)?;
    Ok((1.0 - gc).powi(3))
}

/// Threshold settings used by the discard-gap rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub threshold_step: f64,
    pub threshold_mode: ThresholdMode,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            threshold_step: 1.0,
            threshold_mode: ThresholdMode::Sequence,
        }
    }
}

/// `1 - MDG` with default thresholds (unit step sequence).
pub fn mdg_sqfr(scores: &GroupedScores) -> Result<FairnessScore> {
    mdg_sqfr_with(scores, &EvalOptions::default())
}

pub fn mdg_sqfr_with(scores: &GroupedScores, opts: &EvalOptions) -> Result<FairnessScore> {
    let m = mdg_for(scores, opts.threshold_mode, opts.threshold_step)?;
    Ok(FairnessScore {
        measure: Measure::MdgSqfr,
        value: 1.0 - m,
    })
}

/// All six rates in [`Measure::ALL`] order, with default thresholds.
pub fn evaluate_component(scores: &GroupedScores) -> Result<Vec<FairnessScore>> {
    evaluate_measures(scores, &Measure::ALL, &EvalOptions::default())
}

/// The requested rates, in the order given. Aggregates are computed at most once.
pub fn evaluate_measures(
    scores: &GroupedScores,
    measures: &[Measure],
    opts: &EvalOptions,
) -> Result<Vec<FairnessScore>> {
    let needs = |ms: &[Measure]| measures.iter().any(|m| ms.contains(m));
    let mean_gc = if needs(&[Measure::MeanGcSqfr, Measure::MeanGcCsqfr]) {
        Some(gini_coefficient(&mean_aggregate(scores))?)
    } else {
        None
    };
    let median_gc = if needs(&[Measure::MedianGcSqfr]) {
        Some(gini_coefficient(&median_aggregate(scores))?)
    } else {
        None
    };
    let lwm_gc = if needs(&[Measure::LwmGcSqfr, Measure::LwmGcCsqfr]) {
        Some(gini_coefficient(&lwm_aggregate(scores))?)
    } else {
        None
    };

    measures
        .iter()
        .map(|&measure| {
            let value = match measure {
                Measure::MeanGcSqfr => sqfr(mean_gc.unwrap())?,
                Measure::MeanGcCsqfr => csqfr(mean_gc.unwrap())?,
                Measure::MedianGcSqfr => sqfr(median_gc.unwrap())?,
                Measure::LwmGcSqfr => sqfr(lwm_gc.unwrap())?,
                Measure::LwmGcCsqfr => csqfr(lwm_gc.unwrap())?,
                Measure::MdgSqfr => return mdg_sqfr_with(scores, opts),
            };
            Ok(FairnessScore { measure, value })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(groups: &[(&str, &[f64])]) -> GroupedScores {
        GroupedScores::new("q", groups.iter().map(|(l, s)| (*l, s.to_vec()))).unwrap()
    }

    #[test]
    fn rate_transforms() {
        assert_eq!(sqfr(0.0).unwrap(), 1.0);
        assert_eq!(csqfr(0.0).unwrap(), 1.0);
        assert_eq!(sqfr(1.0).unwrap(), 0.0);
        assert!((csqfr(0.5).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(sqfr(1.5), Err(Error::Domain(_))));
        assert!(matches!(csqfr(-0.1), Err(Error::Domain(_))));
        assert!(sqfr(f64::NAN).is_err());
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert_eq!("LWM-CSQFR".parse::<Measure>().unwrap(), Measure::LwmGcCsqfr);
        assert_eq!("mean_gc_sqfr".parse::<Measure>().unwrap(), Measure::MeanGcSqfr);
        assert!("gini".parse::<Measure>().is_err());
    }

    #[test]
    fn mdg_sqfr_examples() {
        let s = mdg_sqfr(&gs(&[("A", &[1.0, 3.0]), ("B", &[3.0, 3.0])])).unwrap();
        assert_eq!(s.value, 0.5);
        let s = mdg_sqfr(&gs(&[("A", &[2.0, 9.0, 4.0]), ("B", &[4.0, 2.0, 9.0])])).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn all_equal_groups_score_one() {
        let groups: Vec<(String, Vec<f64>)> =
            (0..5).map(|i| (format!("G{i}"), vec![87.5])).collect();
        let g = GroupedScores::new("eq", groups).unwrap();
        let all = evaluate_component(&g).unwrap();
        assert_eq!(all.len(), 6);
        for s in all {
            assert_eq!(s.value, 1.0, "{}", s.measure);
        }
    }

    #[test]
    fn subset_keeps_requested_order() {
        let g = gs(&[("A", &[10.0, 20.0]), ("B", &[30.0])]);
        let out = evaluate_measures(
            &g,
            &[Measure::MdgSqfr, Measure::MeanGcSqfr],
            &EvalOptions::default(),
        )
        .unwrap();
        assert_eq!(out[0].measure, Measure::MdgSqfr);
        assert_eq!(out[1].measure, Measure::MeanGcSqfr);
        // means 15, 30 -> GC = 15 / 45
        assert!((out[1].value - (1.0 - 15.0 / 45.0)).abs() < 1e-12);
    }
}
