//! Per-group quality scores and per-group aggregates.
//!
//! Groups are keyed by an opaque label and always iterated in lexicographic
//! label order. Scores inside a group are stored sorted ascending, which makes
//! every downstream computation independent of input row order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::Diagnostic;
use crate::error::{Error, Result};

/// Quality scores of one quality component, split by demographic group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupedScores {
    component_id: String,
    groups: BTreeMap<String, Vec<f64>>,
}

impl GroupedScores {
    /// Builds and validates a grouping. Requires at least two groups, no empty
    /// group, and only finite non-negative scores.
    pub fn new<L, I>(component_id: impl Into<String>, groups: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (L, Vec<f64>)>,
    {
        let component_id = component_id.into();
        let mut map: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (label, scores) in groups {
            map.entry(label.into()).or_default().extend(scores);
        }
        let errors = structural_diagnostics(&component_id, &map);
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        for scores in map.values_mut() {
            scores.sort_by(f64::total_cmp);
        }
        Ok(Self {
            component_id,
            groups: map,
        })
    }

    pub fn component_id(&self) -> &str {
        &self.component_id
    }

    pub fn n_groups(&self) -> usize {
        self.groups.len()
    }

    /// Groups in label order; each score slice is sorted ascending.
    pub fn groups(&self) -> impl ExactSizeIterator<Item = (&str, &[f64])> + '_ {
        self.groups.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn group(&self, label: &str) -> Option<&[f64]> {
        self.groups.get(label).map(Vec::as_slice)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.groups.keys().map(String::as_str)
    }

    pub fn total_samples(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    /// All scores of all groups (the pooled set), in no particular order.
    pub fn pooled(&self) -> impl Iterator<Item = f64> + '_ {
        self.groups.values().flatten().copied()
    }

    /// Minimum and maximum of the pooled scores.
    pub fn pooled_range(&self) -> (f64, f64) {
        // Groups are sorted and non-empty.
        self.groups
            .values()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
                (lo.min(g[0]), hi.max(g[g.len() - 1]))
            })
    }

    pub(crate) fn into_map(self) -> BTreeMap<String, Vec<f64>> {
        self.groups
    }
}

/// Error-level diagnostics for a raw component grouping.
pub(crate) fn structural_diagnostics(
    component_id: &str,
    groups: &BTreeMap<String, Vec<f64>>,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if groups.len() < 2 {
        out.push(Diagnostic::error(
            component_id,
            format!(
                "n ≥ 2 required: component has {} group(s)",
                groups.len()
            ),
        ));
    }
    for (label, scores) in groups {
        if label.is_empty() {
            out.push(Diagnostic::error(component_id, "empty group label"));
        }
        if scores.is_empty() {
            out.push(Diagnostic::error(
                component_id,
                format!("group '{label}' has no scores"),
            ));
        }
        if let Some(bad) = scores.iter().find(|q| !q.is_finite() || **q < 0.0) {
            out.push(Diagnostic::error(
                component_id,
                format!("group '{label}' contains invalid score {bad} (scores must be finite and ≥ 0)"),
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregatorKind {
    Mean,
    Median,
    Lwm,
}

/// One scalar per group, in the same label order as the source scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAggregates {
    kind: AggregatorKind,
    values: Vec<(String, f64)>,
}

impl GroupAggregates {
    /// Wraps precomputed aggregate values, e.g. the published per-group means
    /// of a table. Values must be finite and non-negative; at least two are required.
    pub fn from_values<L, I>(kind: AggregatorKind, values: I) -> Result<Self>
    where
        L: Into<String>,
        I: IntoIterator<Item = (L, f64)>,
    {
        let values: Vec<(String, f64)> = values.into_iter().map(|(l, v)| (l.into(), v)).collect();
        if values.len() < 2 {
            return Err(Error::Domain(format!(
                "n ≥ 2 required: got {} aggregate value(s)",
                values.len()
            )));
        }
        if let Some((label, v)) = values.iter().find(|(_, v)| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain(format!(
                "aggregate for group '{label}' is {v}; values must be finite and ≥ 0"
            )));
        }
        Ok(Self { kind, values })
    }

    /// Unlabelled convenience constructor; groups are named `G1`, `G2`, ...
    pub fn from_slice(kind: AggregatorKind, values: &[f64]) -> Result<Self> {
        Self::from_values(
            kind,
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("G{}", i + 1), *v)),
        )
    }

    pub(crate) fn new_unchecked(kind: AggregatorKind, values: Vec<(String, f64)>) -> Self {
        Self { kind, values }
    }

    pub fn kind(&self) -> AggregatorKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&str, f64)> + '_ {
        self.values.iter().map(|(l, v)| (l.as_str(), *v))
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_are_sorted_and_label_ordered() {
        let g = GroupedScores::new("q", [("b", vec![3.0, 1.0]), ("a", vec![2.0])]).unwrap();
        let labels: Vec<_> = g.labels().collect();
        assert_eq!(labels, ["a", "b"]);
        assert_eq!(g.group("b").unwrap(), &[1.0, 3.0]);
        assert_eq!(g.pooled_range(), (1.0, 3.0));
        assert_eq!(g.total_samples(), 3);
    }

    #[test]
    fn rejects_single_group() {
        let err = GroupedScores::new("q", [("a", vec![1.0])]).unwrap_err();
        assert!(err.to_string().contains("n ≥ 2 required"), "{err}");
    }

    #[test]
    fn rejects_empty_group_and_bad_scores() {
        assert!(GroupedScores::new("q", [("a", vec![1.0]), ("b", vec![])]).is_err());
        assert!(GroupedScores::new("q", [("a", vec![1.0]), ("b", vec![-0.5])]).is_err());
        assert!(GroupedScores::new("q", [("a", vec![f64::NAN]), ("b", vec![1.0])]).is_err());
        assert!(GroupedScores::new("q", [("a", vec![f64::INFINITY]), ("b", vec![1.0])]).is_err());
    }

    #[test]
    fn aggregates_reject_negative_and_short() {
        assert!(GroupAggregates::from_slice(AggregatorKind::Mean, &[1.0]).is_err());
        assert!(GroupAggregates::from_slice(AggregatorKind::Mean, &[1.0, -1.0]).is_err());
        let a = GroupAggregates::from_slice(AggregatorKind::Mean, &[1.0, 2.0]).unwrap();
        assert_eq!(a.get("G2"), Some(2.0));
    }
}
