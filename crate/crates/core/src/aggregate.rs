//! Group aggregators: mean, median and the low-weighted mean (LWM).

use crate::scores::{AggregatorKind, GroupAggregates, GroupedScores};

pub fn mean(scores: &[f64]) -> f64 {
    scores.iter().sum::<f64>() / scores.len() as f64
}

/// Median of an ascending slice. Even lengths average the two middle order statistics.
pub fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn mean_aggregate(scores: &GroupedScores) -> GroupAggregates {
    collect(scores, AggregatorKind::Mean, mean)
}

pub fn median_aggregate(scores: &GroupedScores) -> GroupAggregates {
    collect(scores, AggregatorKind::Median, median_sorted)
}

/// Low-weighted mean per group.
///
/// Every sample `q` is weighted by `1 - (q - min) / (max - min)`, where `min`
/// and `max` are taken over the pooled scores of *all* groups, so the lowest
/// pooled score weighs 1 and the highest weighs 0. Each group's LWM is the
/// weighted arithmetic mean of its own samples.
///
/// Two degenerate cases are total rather than undefined:
/// - pooled `min == max`: every group gets that single score;
/// - a group whose samples all equal the pooled maximum has zero weight sum
///   and gets the pooled maximum.
pub fn lwm_aggregate(scores: &GroupedScores) -> GroupAggregates {
    let (lo, hi) = scores.pooled_range();
    let span = hi - lo;
    if span == 0.0 {
        return collect(scores, AggregatorKind::Lwm, |_| lo);
    }
    collect(scores, AggregatorKind::Lwm, |group| {
        let (weighted, total) = group.iter().fold((0.0, 0.0), |(ws, w), &q| {
            let weight = 1.0 - (q - lo) / span;
            (ws + weight * q, w + weight)
        });
        if total > 0.0 {
            // Weighted mean of values in [group min, group max]; clamp away rounding drift.
            (weighted / total).clamp(group[0], group[group.len() - 1])
        } else {
            hi
        }
    })
}

pub fn aggregate(scores: &GroupedScores, kind: AggregatorKind) -> GroupAggregates {
    match kind {
        AggregatorKind::Mean => mean_aggregate(scores),
        AggregatorKind::Median => median_aggregate(scores),
        AggregatorKind::Lwm => lwm_aggregate(scores),
    }
}

fn collect(
    scores: &GroupedScores,
    kind: AggregatorKind,
    f: impl Fn(&[f64]) -> f64,
) -> GroupAggregates {
    let values = scores
        .groups()
        .map(|(label, g)| (label.to_owned(), f(g)))
        .collect();
    GroupAggregates::new_unchecked(kind, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(groups: &[(&str, &[f64])]) -> GroupedScores {
        GroupedScores::new("q", groups.iter().map(|(l, s)| (*l, s.to_vec()))).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mean_examples() {
        let m = mean_aggregate(&gs(&[("A", &[1.0, 2.0, 3.0]), ("B", &[10.0, 10.0])]));
        assert_eq!(m.kind(), AggregatorKind::Mean);
        assert_eq!(m.get("A"), Some(2.0));
        assert_eq!(m.get("B"), Some(10.0));

        let m = mean_aggregate(&gs(&[("A", &[5.0]), ("B", &[1.0])]));
        assert_eq!(m.get("A"), Some(5.0));
    }

    #[test]
    fn mean_reproduces_published_group_means() {
        // Symmetric samples around the published Q1 means.
        let m = mean_aggregate(&gs(&[
            ("A", &[79.3, 81.3, 83.3]),
            ("B", &[84.3, 86.3]),
            ("C", &[86.1]),
        ]));
        assert!(close(m.get("A").unwrap(), 81.3, 1e-12));
        assert!(close(m.get("B").unwrap(), 85.3, 1e-12));
        assert!(close(m.get("C").unwrap(), 86.1, 1e-12));
    }

    #[test]
    fn median_examples() {
        let m = median_aggregate(&gs(&[("A", &[7.0]), ("B", &[100.0, 1.0, 101.0, 2.0])]));
        assert_eq!(m.get("A"), Some(7.0));
        assert_eq!(m.get("B"), Some(51.0));
        // Even count producing the non-integer 85.5 of the Q1 table.
        let m = median_aggregate(&gs(&[
            ("A", &[80.0, 82.0, 90.0]),
            ("B", &[84.0, 85.0, 86.0, 88.0]),
            ("C", &[85.0]),
        ]));
        assert_eq!(m.values(), vec![82.0, 85.5, 85.0]);
    }

    #[test]
    fn lwm_degenerate_single_score() {
        let l = lwm_aggregate(&gs(&[("A", &[50.0, 50.0]), ("B", &[50.0])]));
        assert_eq!(l.values(), vec![50.0, 50.0]);
    }

    #[test]
    fn lwm_hand_evaluated() {
        let l = lwm_aggregate(&gs(&[("A", &[0.0, 100.0]), ("B", &[0.0])]));
        assert_eq!(l.values(), vec![0.0, 0.0]);

        let l = lwm_aggregate(&gs(&[("A", &[0.0, 50.0]), ("B", &[100.0, 100.0])]));
        assert!(close(l.get("A").unwrap(), 25.0 / 1.5, 1e-12));
        assert_eq!(l.get("B"), Some(100.0));
    }

    #[test]
    fn lwm_weights_low_scores_higher() {
        let l = lwm_aggregate(&gs(&[("A", &[60.0, 80.0, 100.0]), ("B", &[60.0])]));
        let a = l.get("A").unwrap();
        // weights 1, 0.5, 0 -> (60 + 40) / 1.5
        assert!(close(a, 100.0 / 1.5, 1e-12));
        assert!(a < 80.0);
    }
}
