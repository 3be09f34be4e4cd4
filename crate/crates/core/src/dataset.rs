//! Loading, validating and exporting per-sample quality-score datasets.
//!
//! Two on-disk encodings are supported:
//!
//! - CSV with a header row; default columns `group`, `component`, `score` and
//!   an optional `sample_id`. Any column can be remapped.
//! - JSON of the form `{"components": {"<component>": {"<group>": [scores...]}}}`.
//!
//! Diagnostics carry 1-based data-row numbers (CSV) or JSON paths.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scores::{structural_diagnostics, GroupedScores};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Component id, `row N`, or a JSON path.
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn warning(location: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        if self.location.is_empty() {
            write!(f, "{sev}: {}", self.message)
        } else {
            write!(f, "{sev} [{}]: {}", self.location, self.message)
        }
    }
}

/// One parsed input row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub group_label: String,
    pub component_id: String,
    pub score: f64,
    pub sample_id: Option<String>,
}

impl ScoreRecord {
    /// Checks the record-level invariants; returns a description of the first breach.
    pub fn check(&self) -> std::result::Result<(), String> {
        check_label("group", &self.group_label)?;
        check_label("component", &self.component_id)?;
        check_score(self.score)
    }
}

fn check_label(what: &str, label: &str) -> std::result::Result<(), String> {
    if label.is_empty() {
        return Err(format!("empty {what} label"));
    }
    if label.contains(['\n', '\r', '"']) {
        return Err(format!(
            "{what} label {label:?} contains a line break or quote character"
        ));
    }
    Ok(())
}

fn check_score(score: f64) -> std::result::Result<(), String> {
    if !score.is_finite() {
        return Err(format!("score {score} is not finite"));
    }
    if score < 0.0 {
        return Err(format!("score {score} is negative"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ParseMode {
    /// The first bad row aborts the load.
    #[default]
    Strict,
    /// Bad rows are skipped and reported as warnings.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMapping {
    pub group: String,
    pub component: String,
    pub score: String,
    /// Read when present in the header; never required.
    pub sample: Option<String>,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            group: "group".into(),
            component: "component".into(),
            score: "score".into(),
            sample: Some("sample_id".into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub source: Option<PathBuf>,
    /// Data rows (CSV) or score entries (JSON) read, including skipped ones.
    pub rows: usize,
    pub warnings: Vec<Diagnostic>,
}

/// Scores of every quality component, grouped by demographic group.
///
/// Datasets returned by the loaders have passed [`Dataset::validate`] without
/// errors. [`Dataset::from_records`] does not validate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    components: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
    provenance: Provenance,
}

impl Dataset {
    pub fn from_records(records: impl IntoIterator<Item = ScoreRecord>) -> Self {
        let mut ds = Dataset {
            components: BTreeMap::new(),
            provenance: Provenance::default(),
        };
        for r in records {
            ds.provenance.rows += 1;
            ds.push(r.component_id, r.group_label, r.score);
        }
        ds.sort();
        ds
    }

    pub fn from_grouped(components: impl IntoIterator<Item = GroupedScores>) -> Self {
        let mut ds = Dataset {
            components: BTreeMap::new(),
            provenance: Provenance::default(),
        };
        for g in components {
            let id = g.component_id().to_owned();
            let groups = g.into_map();
            ds.provenance.rows += groups.values().map(Vec::len).sum::<usize>();
            let slot = ds.components.entry(id).or_default();
            for (label, scores) in groups {
                slot.entry(label).or_default().extend(scores);
            }
        }
        ds.sort();
        ds
    }

    fn push(&mut self, component: String, group: String, score: f64) {
        self.components
            .entry(component)
            .or_default()
            .entry(group)
            .or_default()
            .push(score);
    }

    fn sort(&mut self) {
        for groups in self.components.values_mut() {
            for scores in groups.values_mut() {
                scores.sort_by(f64::total_cmp);
            }
        }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn component_ids(&self) -> impl Iterator<Item = &str> + '_ {
        self.components.keys().map(String::as_str)
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn total_records(&self) -> usize {
        self.components
            .values()
            .flat_map(|g| g.values())
            .map(Vec::len)
            .sum()
    }

    /// Raw groups of one component (label order, sorted scores).
    pub fn groups(&self, component: &str) -> Option<&BTreeMap<String, Vec<f64>>> {
        self.components.get(component)
    }

    pub fn component(&self, id: &str) -> Result<GroupedScores> {
        let groups = self
            .components
            .get(id)
            .ok_or_else(|| Error::Config(format!("unknown component '{id}'")))?;
        GroupedScores::new(id, groups.clone())
    }

    /// Every component as validated [`GroupedScores`], in component-id order.
    pub fn grouped(&self) -> Result<Vec<GroupedScores>> {
        self.components
            .iter()
            .map(|(id, groups)| GroupedScores::new(id.clone(), groups.clone()))
            .collect()
    }

    /// Errors for invariant breaches, warnings for suspicious but usable data.
    ///
    /// Warnings: group-size ratio above 10, a single distinct score across a
    /// whole component, scores outside `[0, 100]`.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.components.is_empty() {
            out.push(Diagnostic::error("", "dataset contains no components"));
        }
        for (id, groups) in &self.components {
            let errors = structural_diagnostics(id, groups);
            let broken = !errors.is_empty();
            out.extend(errors);
            if broken {
                continue;
            }

            let sizes = groups.values().map(Vec::len);
            let (min_n, max_n) = sizes.fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)));
            let ratio = max_n as f64 / min_n as f64;
            if ratio > 10.0 {
                out.push(Diagnostic::warning(
                    id.as_str(),
                    format!(
                        "severely unbalanced groups: largest/smallest size ratio {ratio:.1} > 10 ({max_n} vs {min_n}); groups are not weighted by size"
                    ),
                ));
            }

            let mut pooled = groups.values().flatten();
            let first = *pooled.next().expect("non-empty after structural checks");
            if pooled.all(|q| *q == first) {
                out.push(Diagnostic::warning(
                    id.as_str(),
                    format!("single-valued component: every score equals {first}"),
                ));
            }

            let outside = groups.values().flatten().filter(|q| **q > 100.0).count();
            if outside > 0 {
                out.push(Diagnostic::warning(
                    id.as_str(),
                    format!("{outside} score(s) outside the conventional [0, 100] range"),
                ));
            }
        }
        out
    }

    fn finish(mut self, source: Option<PathBuf>, rows: usize, warnings: Vec<Diagnostic>) -> Result<Self> {
        self.provenance = Provenance {
            source,
            rows,
            warnings,
        };
        let diags = self.validate();
        let (errors, warnings): (Vec<_>, Vec<_>) = diags.into_iter().partition(Diagnostic::is_error);
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        self.provenance.warnings.extend(warnings);
        Ok(self)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_err = |e: csv::Error| Error::parse("csv output", e.to_string());
        w.write_record(["component", "group", "score"]).map_err(to_err)?;
        for (id, groups) in &self.components {
            for (label, scores) in groups {
                for q in scores {
                    w.write_record([id.as_str(), label.as_str(), &q.to_string()])
                        .map_err(to_err)?;
                }
            }
        }
        w.flush().map_err(|e| Error::io("csv output", e))
    }

    pub fn to_json_value(&self) -> Value {
        #[derive(Serialize)]
        struct Doc<'a> {
            components: &'a BTreeMap<String, BTreeMap<String, Vec<f64>>>,
        }
        serde_json::to_value(Doc {
            components: &self.components,
        })
        .expect("plain maps of finite numbers always serialize")
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.to_json_value())
            .expect("plain maps of finite numbers always serialize");
        text.push('\n');
        out.write_all(text.as_bytes())
            .map_err(|e| Error::io("json output", e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// `.json` means JSON; anything else is read as CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

pub fn load(path: &Path, mapping: &ColumnMapping, mode: ParseMode) -> Result<Dataset> {
    match DataFormat::from_path(path) {
        DataFormat::Csv => load_csv(path, mapping, mode),
        DataFormat::Json => load_json(path),
    }
}

pub fn load_csv(path: &Path, mapping: &ColumnMapping, mode: ParseMode) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(BufReader::new(file), Some(path.to_path_buf()), mapping, mode)
}

/// Streaming CSV parse from any reader.
pub fn read_csv<R: Read>(
    reader: R,
    source: Option<PathBuf>,
    mapping: &ColumnMapping,
    mode: ParseMode,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::parse("header", e.to_string()))?
        .clone();
    let column = |name: &str| -> Result<usize> {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!(
                "column '{name}' not found in header [{}]",
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let group_col = column(&mapping.group)?;
    let component_col = column(&mapping.component)?;
    let score_col = column(&mapping.score)?;
    let sample_col = mapping
        .sample
        .as_deref()
        .and_then(|name| headers.iter().position(|h| h == name));

    let mut ds = Dataset {
        components: BTreeMap::new(),
        provenance: Provenance::default(),
    };
    let mut warnings = Vec::new();
    let mut rows = 0usize;

    for (idx, result) in rdr.records().enumerate() {
        let row = idx + 1;
        rows += 1;
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                let err = Error::parse(format!("row {row}"), e.to_string());
                match mode {
                    ParseMode::Strict => return Err(err),
                    ParseMode::Lenient => {
                        warnings.push(Diagnostic::warning(format!("row {row}"), format!("skipped: {e}")));
                        continue;
                    }
                }
            }
        };

        match parse_row(&record, group_col, component_col, score_col, sample_col) {
            Ok(rec) => ds.push(rec.component_id, rec.group_label, rec.score),
            Err(RowError::Parse(msg)) => match mode {
                ParseMode::Strict => return Err(Error::parse(format!("row {row}"), msg)),
                ParseMode::Lenient => {
                    warnings.push(Diagnostic::warning(format!("row {row}"), format!("skipped: {msg}")))
                }
            },
            Err(RowError::Invalid(msg)) => match mode {
                ParseMode::Strict => {
                    return Err(Error::Validation(vec![Diagnostic::error(format!("row {row}"), msg)]))
                }
                ParseMode::Lenient => {
                    warnings.push(Diagnostic::warning(format!("row {row}"), format!("skipped: {msg}")))
                }
            },
        }
    }

    ds.sort();
    ds.finish(source, rows, warnings)
}

enum RowError {
    /// Not readable at all (missing field, non-numeric score).
    Parse(String),
    /// Readable but breaks a record invariant.
    Invalid(String),
}

fn parse_row(
    record: &csv::StringRecord,
    group_col: usize,
    component_col: usize,
    score_col: usize,
    sample_col: Option<usize>,
) -> std::result::Result<ScoreRecord, RowError> {
    let field = |i: usize, name: &str| {
        record
            .get(i)
            .ok_or_else(|| RowError::Parse(format!("missing '{name}' field")))
    };
    let group = field(group_col, "group")?;
    let component = field(component_col, "component")?;
    let raw_score = field(score_col, "score")?;
    let score: f64 = raw_score
        .parse()
        .map_err(|_| RowError::Parse(format!("score {raw_score:?} is not a number")))?;
    let rec = ScoreRecord {
        group_label: group.to_owned(),
        component_id: component.to_owned(),
        score,
        sample_id: sample_col
            .and_then(|i| record.get(i))
            .filter(|s| !s.is_empty())
            .map(str::to_owned),
    };
    rec.check().map_err(RowError::Invalid)?;
    Ok(rec)
}

pub fn load_json(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_json(BufReader::new(file), Some(path.to_path_buf()))
}

pub fn read_json<R: Read>(reader: R, source: Option<PathBuf>) -> Result<Dataset> {
    let doc: Value = serde_json::from_reader(reader)
        .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    let root = doc
        .as_object()
        .ok_or_else(|| Error::parse("$", "expected an object"))?;
    let components = root
        .get("components")
        .ok_or_else(|| Error::parse("$", "missing key 'components'"))?
        .as_object()
        .ok_or_else(|| Error::parse("$.components", "expected an object"))?;

    let mut ds = Dataset {
        components: BTreeMap::new(),
        provenance: Provenance::default(),
    };
    let mut rows = 0usize;
    let mut invalid = Vec::new();
    for (cid, groups) in components {
        let cpath = format!("$.components.{cid}");
        if let Err(msg) = check_label("component", cid) {
            invalid.push(Diagnostic::error(cpath.as_str(), msg));
            continue;
        }
        let groups = groups
            .as_object()
            .ok_or_else(|| Error::parse(cpath.as_str(), "expected an object of groups"))?;
        let slot = ds.components.entry(cid.clone()).or_default();
        for (label, scores) in groups {
            let gpath = format!("{cpath}.{label}");
            if let Err(msg) = check_label("group", label) {
                invalid.push(Diagnostic::error(gpath.as_str(), msg));
                continue;
            }
            let scores = scores
                .as_array()
                .ok_or_else(|| Error::parse(gpath.as_str(), "expected an array of numbers"))?;
            let bucket = slot.entry(label.clone()).or_default();
            for (i, v) in scores.iter().enumerate() {
                rows += 1;
                let epath = format!("{gpath}[{i}]");
                let q = v
                    .as_f64()
                    .ok_or_else(|| Error::parse(epath.as_str(), format!("expected a number, found {v}")))?;
                match check_score(q) {
                    Ok(()) => bucket.push(q),
                    Err(msg) => invalid.push(Diagnostic::error(epath, msg)),
                }
            }
        }
    }
    if !invalid.is_empty() {
        return Err(Error::Validation(invalid));
    }
    ds.sort();
    ds.finish(source, rows, Vec::new())
}
