//! Bias-corrected Gini coefficient over group aggregates.

use crate::error::{Error, Result};
use crate::scores::GroupAggregates;

/// Gini coefficient of the group aggregates with the `n / (n - 1)` correction
/// for group self-comparisons.
///
/// For `n` groups with aggregate values `x` and mean `x̄`:
///
/// ```text
/// GC = n / (n - 1) * Σ_i Σ_j |x_i - x_j| / (2 n² x̄)
/// ```
///
/// The correction removes the `(n - 1) / n` ceiling of the plain Gini, so the
/// result spans the full `[0, 1]` for non-negative inputs. Each group is one
/// point regardless of how many samples it holds.
pub fn gini_coefficient(aggregates: &GroupAggregates) -> Result<f64> {
    gini_of(&aggregates.values())
}

/// [`gini_coefficient`] on bare values.
///
/// Identical values, including all zeros, have GC = 0.
pub fn gini_of(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "n ≥ 2 required for the Gini coefficient, got {n} value(s)"
        )));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Domain(format!(
            "Gini coefficient needs finite non-negative values, got {v}"
        )));
    }

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }

    // Σ_{i<j} (x_j - x_i) written over adjacent gaps: the gap between order
    // statistics k and k+1 is crossed by (k + 1)(n - 1 - k) pairs. Every term
    // is non-negative, so there is no cancellation.
    let half_abs_sum: f64 = sorted
        .windows(2)
        .enumerate()
        .map(|(k, w)| (w[1] - w[0]) * ((k + 1) * (n - 1 - k)) as f64)
        .sum();

    // n/(n-1) * 2*half / (2 n^2 * total/n) = half / ((n-1) * total)
    let gc = half_abs_sum / ((n - 1) as f64 * total);
    Ok(gc.clamp(0.0, 1.0))
}
