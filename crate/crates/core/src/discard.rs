//! Threshold sweeps, per-group discard curves and the mean discard gap (MDG).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scores::GroupedScores;

/// How the relevant threshold set is built from the pooled scores.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// `min + step, min + 2·step, …` up to and including the pooled maximum.
    #[default]
    Sequence,
    /// Every distinct pooled score strictly above the pooled minimum.
    Observed,
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::Sequence => "sequence",
            ThresholdMode::Observed => "observed",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequence" => Ok(Self::Sequence),
            "observed" => Ok(Self::Observed),
            other => Err(Error::Config(format!(
                "unknown threshold mode '{other}' (expected 'sequence' or 'observed')"
            ))),
        }
    }
}

/// A sample is discarded at threshold `t` iff its score is strictly below `t`.
#[inline]
pub fn is_discarded(score: f64, threshold: f64) -> bool {
    score < threshold
}

/// Relevant thresholds `{min + step, min + 2·step, …, max}` over the pooled scores.
///
/// The sequence starts one step above the pooled minimum, so the first
/// threshold is the lowest one that discards anything. The pooled maximum is
/// always the final element, even when `max - min` is not a multiple of `step`.
/// Returns an empty list when every pooled score is identical.
pub fn relevant_thresholds(scores: &GroupedScores, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Domain(format!(
            "threshold step must be finite and > 0, got {step}"
        )));
    }
    let (lo, hi) = scores.pooled_range();
    let mut out = Vec::new();
    if hi <= lo {
        return Ok(out);
    }
    // Snap a threshold that lands within rounding noise of `max` onto `max`.
    let eps = step * 1e-9;
    let mut k = 1u64;
    loop {
        let t = lo + k as f64 * step;
        if t > hi - eps {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(hi);
    Ok(out)
}

/// Distinct pooled scores strictly above the pooled minimum, ascending.
pub fn observed_thresholds(scores: &GroupedScores) -> Vec<f64> {
    let (lo, _) = scores.pooled_range();
    let mut all: Vec<f64> = scores.pooled().filter(|q| *q > lo).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

pub fn thresholds_for(scores: &GroupedScores, mode: ThresholdMode, step: f64) -> Result<Vec<f64>> {
    match mode {
        ThresholdMode::Sequence => relevant_thresholds(scores, step),
        ThresholdMode::Observed => {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::Domain(format!(
                    "threshold step must be finite and > 0, got {step}"
                )));
            }
            Ok(observed_thresholds(scores))
        }
    }
}

/// Fraction of each group's samples discarded at each threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscardCurve {
    thresholds: Vec<f64>,
    fractions: BTreeMap<String, Vec<f64>>,
}

impl DiscardCurve {
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn fractions(&self) -> impl Iterator<Item = (&str, &[f64])> + '_ {
        self.fractions.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn group(&self, label: &str) -> Option<&[f64]> {
        self.fractions.get(label).map(Vec::as_slice)
    }

    pub fn n_groups(&self) -> usize {
        self.fractions.len()
    }

    /// Largest minus smallest group fraction at threshold index `k`.
    pub fn gap_at(&self, k: usize) -> f64 {
        let (lo, hi) = self
            .fractions
            .values()
            .map(|f| f[k])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                (lo.min(x), hi.max(x))
            });
        hi - lo
    }
}

/// Discard fraction of every group at every threshold. Thresholds must be ascending.
pub fn discard_curve(scores: &GroupedScores, thresholds: &[f64]) -> Result<DiscardCurve> {
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("thresholds must be sorted ascending".into()));
    }
    let fractions = scores
        .groups()
        .map(|(label, sorted)| {
            let n = sorted.len() as f64;
            let row = thresholds
                .iter()
                .map(|&t| sorted.partition_point(|&q| is_discarded(q, t)) as f64 / n)
                .collect();
            (label.to_owned(), row)
        })
        .collect();
    Ok(DiscardCurve {
        thresholds: thresholds.to_vec(),
        fractions,
    })
}

/// Mean over thresholds of the max-minus-min discard fraction across groups.
///
/// Only the extreme groups at each threshold matter; groups in between do not
/// change the result. Returns [`Error::NoThresholds`] for an empty curve.
pub fn mdg(curve: &DiscardCurve) -> Result<f64> {
    if curve.n_groups() < 2 {
        return Err(Error::Domain(format!(
            "n ≥ 2 required for the discard gap, got {} group(s)",
            curve.n_groups()
        )));
    }
    let k = curve.thresholds.len();
    if k == 0 {
        return Err(Error::NoThresholds);
    }
    let total: f64 = (0..k).map(|i| curve.gap_at(i)).sum();
    Ok((total / k as f64).clamp(0.0, 1.0))
}

/// MDG for a grouping; an empty threshold set (all pooled scores identical) counts as MDG = 0.
pub fn mdg_for(scores: &GroupedScores, mode: ThresholdMode, step: f64) -> Result<f64> {
    let thresholds = thresholds_for(scores, mode, step)?;
    match mdg(&discard_curve(scores, &thresholds)?) {
        Err(Error::NoThresholds) => Ok(0.0),
        other => other,
    }
}
