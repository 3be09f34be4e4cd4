//! Sample quality fairness rates (SQFR).
//!
//! Differential performance measures for biometric quality assessment: given
//! per-sample quality scores of one quality component split by demographic
//! group, quantify how evenly the quality algorithm treats the groups. Every
//! rate lies in `[0, 1]`, higher is fairer.
//!
//! | Measure | Definition |
//! |---|---|
//! | `mean-gc-sqfr` | `1 - GC(group means)` |
//! | `median-gc-sqfr` | `1 - GC(group medians)` |
//! | `mean-gc-csqfr` | `(1 - GC(group means))³` |
//! | `lwm-gc-sqfr` | `1 - GC(group low-weighted means)` |
//! | `lwm-gc-csqfr` | `(1 - GC(group low-weighted means))³` |
//! | `mdg-sqfr` | `1 - mean over thresholds of (max - min group discard fraction)` |
//!
//! GC is the Gini coefficient with the `n / (n - 1)` small-sample correction,
//! computed over one aggregate per group. Groups are never weighted by their
//! sample count, so a group of 10 samples counts as much as a group of 10 000.
//!
//! ```
//! use sqfr::{evaluate_component, GroupedScores, Measure};
//!
//! let scores = GroupedScores::new(
//!     "eyes-open",
//!     [("A", vec![76.0, 77.0]), ("B", vec![89.0, 90.0]), ("C", vec![90.0, 90.4])],
//! )
//! .unwrap();
//! let rates = evaluate_component(&scores).unwrap();
//! assert_eq!(rates[0].measure, Measure::MeanGcSqfr);
//! assert!(rates.iter().all(|r| (0.0..=1.0).contains(&r.value)));
//! ```

pub mod aggregate;
pub mod dataset;
pub mod discard;
pub mod error;
pub mod gini;
pub mod measures;
pub mod plot;
pub mod report;
pub mod scenario;
pub mod scores;

pub use aggregate::{aggregate, lwm_aggregate, mean_aggregate, median_aggregate};
pub use dataset::{ColumnMapping, Dataset, Diagnostic, ParseMode, ScoreRecord, Severity};
pub use discard::{discard_curve, mdg, relevant_thresholds, DiscardCurve, ThresholdMode};
pub use error::{Error, Result};
pub use gini::{gini_coefficient, gini_of};
pub use measures::{
    csqfr, evaluate_component, evaluate_measures, mdg_sqfr, sqfr, EvalOptions, FairnessScore,
    Measure,
};
pub use report::{build_report, FairnessReport, ReportOptions};
pub use scenario::{builtin_fixtures, generate, AggregateFixture, ScenarioSpec};
pub use scores::{AggregatorKind, GroupAggregates, GroupedScores};
