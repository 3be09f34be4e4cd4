//! Fairness reports: every requested rate for every component of a dataset,
//! rendered as JSON, CSV or Markdown.
//!
//! JSON and CSV carry raw doubles (shortest round-trip form). Markdown rounds
//! to `precision` decimals. Component, group and measure order is fixed, so
//! identical inputs always render to identical bytes.

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::aggregate::{lwm_aggregate, mean_aggregate, median_aggregate};
use crate::dataset::Dataset;
use crate::discard::ThresholdMode;
use crate::error::{Error, Result};
use crate::measures::{evaluate_measures, EvalOptions, FairnessScore, Measure};
use crate::scores::GroupedScores;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq)]
pub struct ReportOptions {
    pub measures: Vec<Measure>,
    pub eval: EvalOptions,
    pub precision: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            measures: Measure::ALL.to_vec(),
            eval: EvalOptions::default(),
            precision: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub lwm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub component: String,
    pub groups: Vec<GroupSummary>,
    #[serde(serialize_with = "scores_as_map")]
    pub scores: Vec<FairnessScore>,
}

impl ComponentReport {
    pub fn score(&self, measure: Measure) -> Option<f64> {
        self.scores.iter().find(|s| s.measure == measure).map(|s| s.value)
    }
}

fn scores_as_map<S: Serializer>(scores: &[FairnessScore], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(scores.len()))?;
    for sc in scores {
        map.serialize_entry(sc.measure.name(), &sc.value)?;
    }
    map.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMetadata {
    pub input: Option<String>,
    pub measures: Vec<Measure>,
    pub threshold_step: f64,
    pub thresholds: ThresholdMode,
    pub precision: usize,
    pub tool_version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessReport {
    pub metadata: ReportMetadata,
    pub components: Vec<ComponentReport>,
}

impl FairnessReport {
    pub fn component(&self, id: &str) -> Option<&ComponentReport> {
        self.components.iter().find(|c| c.component == id)
    }
}

pub fn evaluate_grouped(scores: &GroupedScores, opts: &ReportOptions) -> Result<ComponentReport> {
    let means = mean_aggregate(scores);
    let medians = median_aggregate(scores);
    let lwms = lwm_aggregate(scores);
    let groups = scores
        .groups()
        .zip(means.iter().zip(medians.iter()).zip(lwms.iter()))
        .map(|((label, g), (((_, mean), (_, median)), (_, lwm)))| GroupSummary {
            group: label.to_owned(),
            count: g.len(),
            mean,
            median,
            lwm,
        })
        .collect();
    Ok(ComponentReport {
        component: scores.component_id().to_owned(),
        groups,
        scores: evaluate_measures(scores, &opts.measures, &opts.eval)?,
    })
}

/// Evaluates every component of `dataset`, in component-id order.
pub fn build_report(dataset: &Dataset, input: Option<String>, opts: &ReportOptions) -> Result<FairnessReport> {
    if opts.measures.is_empty() {
        return Err(Error::Config("no measures selected".into()));
    }
    let components = dataset
        .grouped()?
        .iter()
        .map(|g| evaluate_grouped(g, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(FairnessReport {
        metadata: ReportMetadata {
            input,
            measures: opts.measures.clone(),
            threshold_step: opts.eval.threshold_step,
            thresholds: opts.eval.threshold_mode,
            precision: opts.precision,
            tool_version: TOOL_VERSION.to_owned(),
        },
        components,
    })
}

pub fn render_json(report: &FairnessReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report values are finite");
    s.push('\n');
    s
}

/// One row per component, one column per measure.
pub fn render_csv(report: &FairnessReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::parse("csv output", e.to_string());
    let mut header = vec!["component".to_owned()];
    header.extend(report.metadata.measures.iter().map(|m| m.name().to_owned()));
    w.write_record(&header).map_err(to_err)?;
    for c in &report.components {
        let mut row = vec![c.component.clone()];
        row.extend(c.scores.iter().map(|s| s.value.to_string()));
        w.write_record(&row).map_err(to_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::parse("csv output", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

pub fn render_markdown(report: &FairnessReport) -> String {
    let p = report.metadata.precision;
    let mut out = String::new();
    out.push_str("# Sample quality fairness report\n\n");
    if let Some(input) = &report.metadata.input {
        out.push_str(&format!("Input: `{input}`  \n"));
    }
    out.push_str(&format!(
        "Thresholds: {} (step {})  \nVersion: {}\n\n",
        report.metadata.thresholds, report.metadata.threshold_step, report.metadata.tool_version
    ));

    out.push_str("| Component |");
    for m in &report.metadata.measures {
        out.push_str(&format!(" {m} |"));
    }
    out.push_str("\n|---|");
    for _ in &report.metadata.measures {
        out.push_str("---:|");
    }
    out.push('\n');
    for c in &report.components {
        out.push_str(&format!("| {} |", c.component));
        for s in &c.scores {
            out.push_str(&format!(" {:.*} |", p, s.value));
        }
        out.push('\n');
    }

    for c in &report.components {
        out.push_str(&format!(
            "\n## {}\n\n| Group | n | Mean | Median | LWM |\n|---|---:|---:|---:|---:|\n",
            c.component
        ));
        for g in &c.groups {
            out.push_str(&format!(
                "| {} | {} | {:.*} | {:.*} | {:.*} |\n",
                g.group, g.count, p, g.mean, p, g.median, p, g.lwm
            ));
        }
    }
    out
}
