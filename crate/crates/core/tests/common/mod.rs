//! Independent oracles and generators shared by the integration tests.
//! Nothing here calls into the optimized library paths it is used to check.

#![allow(dead_code)]

use proptest::prelude::*;
use sqfr::GroupedScores;

/// Gini coefficient as the literal double loop over all ordered pairs
/// (self-pairs included), with the n/(n-1) correction.
pub fn gini_literal(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for a in values {
        for b in values {
            s += (a - b).abs();
        }
    }
    (n / (n - 1.0)) * s / (2.0 * n * n * mean)
}

/// MDG by brute force: integer thresholds min+1..=max over the pooled scores,
/// then a linear recount of every (group, threshold) pair.
pub fn mdg_brute_force(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let lo = pooled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pooled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut thresholds = Vec::new();
    let mut t = lo + 1.0;
    while t <= hi {
        thresholds.push(t);
        t += 1.0;
    }
    if thresholds.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &t in &thresholds {
        let mut fmin = f64::INFINITY;
        let mut fmax = f64::NEG_INFINITY;
        for g in groups {
            let mut below = 0usize;
            for &q in g {
                if q < t {
                    below += 1;
                }
            }
            let f = below as f64 / g.len() as f64;
            fmin = fmin.min(f);
            fmax = fmax.max(f);
        }
        total += fmax - fmin;
    }
    total / thresholds.len() as f64
}

pub fn relative_close(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

pub fn label(i: usize) -> String {
    format!("g{i:02}")
}

pub fn grouped(groups: &[Vec<f64>]) -> GroupedScores {
    GroupedScores::new("c", groups.iter().enumerate().map(|(i, g)| (label(i), g.clone()))).unwrap()
}

/// 2..=max_groups groups of 1..=max_len real scores in [0, 100].
pub fn real_groups(max_groups: usize, max_len: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(0.0f64..100.0, 1..=max_len), 2..=max_groups)
}

/// 2..=max_groups groups of integer-valued scores in [0, 100], at most `max_total` samples overall.
pub fn integer_groups(max_groups: usize, max_total: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2..=max_groups).prop_flat_map(move |k| {
        let per = (max_total / k).max(1);
        prop::collection::vec(
            prop::collection::vec((0u32..=100).prop_map(f64::from), 1..=per),
            k,
        )
    })
}
