//! `sqfr`: evaluate, simulate and export fairness data for quality components.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 validation or configuration failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use sqfr::dataset::{self, DataFormat};
use sqfr::plot::{self, PlotOptions};
use sqfr::report::{self, ReportOptions};
use sqfr::scenario::{self, ScenarioSpec};
use sqfr::{ColumnMapping, Error, EvalOptions, Measure, ParseMode, ThresholdMode};

#[derive(Parser)]
#[command(name = "sqfr", version, about = "Sample quality fairness rates for biometric quality components")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every fairness measure for every quality component of a dataset
    Eval(EvalArgs),
    /// Generate a seeded synthetic dataset
    Simulate(SimulateArgs),
    /// Export per-group histograms and kernel density estimates
    Plotdata(PlotArgs),
    /// Print the built-in reference fixtures with recomputed values
    Fixtures(FixtureArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataFormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdArg {
    Sequence,
    Observed,
}

#[derive(Args)]
struct InputArgs {
    /// Dataset file (.json for JSON, anything else is read as CSV)
    #[arg(value_name = "INPUT")]
    path: Option<PathBuf>,
    #[arg(long = "input", value_name = "PATH", conflicts_with = "path")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "group")]
    group_col: String,
    #[arg(long, default_value = "component")]
    component_col: String,
    #[arg(long, default_value = "score")]
    score_col: String,
    #[arg(long, default_value = "sample_id")]
    sample_col: String,
    /// Abort on the first malformed row (default)
    #[arg(long, overrides_with = "lenient")]
    strict: bool,
    /// Skip malformed rows and report them as warnings
    #[arg(long, overrides_with = "strict")]
    lenient: bool,
}

impl InputArgs {
    fn path(&self) -> Result<&Path, Failure> {
        self.input
            .as_deref()
            .or(self.path.as_deref())
            .ok_or_else(|| Failure::config("an input dataset is required (--input PATH)"))
    }

    fn load(&self) -> Result<(PathBuf, sqfr::Dataset), Failure> {
        let path = self.path()?.to_path_buf();
        let mapping = ColumnMapping {
            group: self.group_col.clone(),
            component: self.component_col.clone(),
            score: self.score_col.clone(),
            sample: Some(self.sample_col.clone()),
        };
        let mode = if self.lenient { ParseMode::Lenient } else { ParseMode::Strict };
        let ds = dataset::load(&path, &mapping, mode)?;
        for w in &ds.provenance().warnings {
            eprintln!("{w}");
        }
        Ok((path, ds))
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: ReportFormat,
    /// Comma-separated measures, e.g. mean-gc-sqfr,mdg-sqfr (default: all six)
    #[arg(long, value_delimiter = ',')]
    measures: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    threshold_step: f64,
    #[arg(long, value_enum, default_value = "sequence")]
    thresholds: ThresholdArg,
    /// Decimal places in human-readable output
    #[arg(long, env = "SQFR_PRECISION", default_value_t = 3)]
    precision: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Built-in scenario name(s); each becomes one quality component
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    /// Scenario spec file(s): one spec object or an array of them
    #[arg(long)]
    spec: Vec<PathBuf>,
    /// Base seed; the i-th generated component uses seed + i
    #[arg(long)]
    seed: Option<u64>,
    /// Output dataset path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output encoding (default: from the --out extension, else csv)
    #[arg(long, value_enum)]
    format: Option<DataFormatArg>,
    #[arg(long, env = "SQFR_PRECISION", default_value_t = 3)]
    precision: usize,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: DataFormatArg,
    #[arg(long, default_value_t = 1.0)]
    bin_width: f64,
    #[arg(long, default_value_t = 256)]
    grid_points: usize,
    /// Multiplier applied to the Silverman bandwidth
    #[arg(long, default_value_t = 1.0)]
    bandwidth_scale: f64,
    /// Histograms only
    #[arg(long)]
    no_density: bool,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(long, value_enum, default_value = "markdown")]
    format: ReportFormat,
    /// Comma-separated fixture names (default: all)
    #[arg(long, value_delimiter = ',')]
    names: Vec<String>,
    /// Also write the selected fixtures as a dataset, one component per
    /// fixture and one sample per group at the published aggregate
    #[arg(long, value_name = "PATH")]
    export: Option<PathBuf>,
    #[arg(long, env = "SQFR_PRECISION", default_value_t = 3)]
    precision: usize,
}

/// A failed command: message for stderr plus exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io { .. } | Error::Parse { .. } => 1,
            Error::Validation(_) | Error::Config(_) | Error::Domain(_) | Error::NoThresholds => 2,
        };
        let message = match &e {
            Error::Validation(diags) => diags
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("\n"),
            other => other.to_string(),
        };
        Self { code, message }
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?,
        None => io::stdout()
            .lock()
            .write_all(content.as_bytes())
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })?,
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let measures = if args.measures.is_empty() {
        Measure::ALL.to_vec()
    } else {
        args.measures
            .iter()
            .map(|m| m.parse::<Measure>())
            .collect::<Result<Vec<_>, _>>()?
    };
    let opts = ReportOptions {
        measures,
        eval: EvalOptions {
            threshold_step: args.threshold_step,
            threshold_mode: match args.thresholds {
                ThresholdArg::Sequence => ThresholdMode::Sequence,
                ThresholdArg::Observed => ThresholdMode::Observed,
            },
        },
        precision: args.precision,
    };
    let (path, ds) = args.input.load()?;
    let report = report::build_report(&ds, Some(path.display().to_string()), &opts)?;
    let text = match args.format {
        ReportFormat::Json => report::render_json(&report),
        ReportFormat::Csv => report::render_csv(&report)?,
        ReportFormat::Markdown => report::render_markdown(&report),
    };
    emit(args.out.as_deref(), &text)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SpecDocument {
    One(ScenarioSpec),
    Many(Vec<ScenarioSpec>),
}

fn read_specs(path: &Path) -> Result<Vec<ScenarioSpec>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let doc: SpecDocument = serde_json::from_str(&text).map_err(|e| {
        Failure::config(format!("invalid scenario spec {}: {e}", path.display()))
    })?;
    Ok(match doc {
        SpecDocument::One(s) => vec![s],
        SpecDocument::Many(v) => v,
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let mut specs = Vec::new();
    for name in &args.scenario {
        match scenario::builtin_scenario(name) {
            Some(s) => specs.push(s),
            None => {
                let names: Vec<String> =
                    scenario::builtin_scenarios().into_iter().map(|s| s.name).collect();
                return Err(Failure::config(format!(
                    "unknown scenario '{name}'; available: {}",
                    names.join(", ")
                )));
            }
        }
    }
    for path in &args.spec {
        specs.extend(read_specs(path)?);
    }
    if specs.is_empty() {
        return Err(Failure::config("nothing to simulate: pass --scenario or --spec"));
    }
    if let Some(base) = args.seed {
        for (i, s) in specs.iter_mut().enumerate() {
            s.seed = base.wrapping_add(i as u64);
        }
    }
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Failure::config(format!("component '{}' generated twice", w[0])));
    }

    let generated = specs
        .iter()
        .map(scenario::generate)
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = String::new();
    for g in &generated {
        for (label, n, mean, median) in scenario::summarize(g) {
            summary.push_str(&format!(
                "{}\t{label}\tn={n}\tmean={:.*}\tmedian={:.*}\n",
                g.component_id(),
                args.precision,
                mean,
                args.precision,
                median
            ));
        }
    }

    let ds = sqfr::Dataset::from_grouped(generated);
    let format = match (args.format, &args.out) {
        (Some(DataFormatArg::Json), _) => DataFormat::Json,
        (Some(DataFormatArg::Csv), _) => DataFormat::Csv,
        (None, Some(p)) => DataFormat::from_path(p),
        (None, None) => DataFormat::Csv,
    };
    let mut buf = Vec::new();
    match format {
        DataFormat::Csv => ds.write_csv(&mut buf)?,
        DataFormat::Json => ds.write_json(&mut buf)?,
    }
    emit(args.out.as_deref(), std::str::from_utf8(&buf).expect("utf-8 output"))?;

    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn cmd_plotdata(args: &PlotArgs) -> Result<(), Failure> {
    let (_, ds) = args.input.load()?;
    let opts = PlotOptions {
        bin_width: args.bin_width,
        grid_points: args.grid_points,
        bandwidth_scale: args.bandwidth_scale,
        density: !args.no_density,
    };
    let data = plot::plot_data(&ds, &opts)?;
    for w in &data.warnings {
        eprintln!("{w}");
    }
    let text = match args.format {
        DataFormatArg::Json => plot::render_json(&data),
        DataFormatArg::Csv => plot::render_csv(&data)?,
    };
    emit(args.out.as_deref(), &text)
}

fn cmd_fixtures(args: &FixtureArgs) -> Result<(), Failure> {
    let p = args.precision;
    let mut fixtures = scenario::builtin_fixtures();
    if !args.names.is_empty() {
        if let Some(missing) = args.names.iter().find(|n| !fixtures.iter().any(|f| f.name == n.as_str())) {
            let known: Vec<&str> = fixtures.iter().map(|f| f.name).collect();
            return Err(Failure::config(format!(
                "unknown fixture '{missing}'; available: {}",
                known.join(", ")
            )));
        }
        fixtures.retain(|f| args.names.iter().any(|n| n == f.name));
    }
    if let Some(path) = &args.export {
        let ds = sqfr::Dataset::from_grouped(fixtures.iter().map(|f| f.to_grouped()));
        let mut buf = Vec::new();
        match DataFormat::from_path(path) {
            DataFormat::Csv => ds.write_csv(&mut buf)?,
            DataFormat::Json => ds.write_json(&mut buf)?,
        }
        emit(Some(path), std::str::from_utf8(&buf).expect("utf-8 output"))?;
    }
    let mut rows = Vec::new();
    for f in &fixtures {
        for c in f.check()? {
            rows.push((f, c));
        }
    }
    let text = match args.format {
        ReportFormat::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|(f, c)| {
                    serde_json::json!({
                        "fixture": f.name,
                        "aggregator": f.aggregator,
                        "group_values": f.group_values.iter().map(|(l, v)| serde_json::json!([l, v])).collect::<Vec<_>>(),
                        "measure": c.measure,
                        "expected": c.expected,
                        "actual": c.actual,
                        "tolerance": c.tolerance,
                        "passed": c.passed(),
                        "source": f.source,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&items).expect("finite values");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut s = String::from("fixture,values,measure,expected,actual,tolerance,passed\n");
            for (f, c) in &rows {
                let values: Vec<String> = f.group_values.iter().map(|(_, v)| v.to_string()).collect();
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    f.name,
                    values.join(";"),
                    c.measure,
                    c.expected,
                    c.actual,
                    c.tolerance,
                    c.passed()
                ));
            }
            s
        }
        ReportFormat::Markdown => {
            let mut s = String::from(
                "| Fixture | Values | Measure | Expected | Computed | Tolerance | OK |\n|---|---|---|---:|---:|---:|:-:|\n",
            );
            for (f, c) in &rows {
                let values: Vec<String> = f.group_values.iter().map(|(_, v)| v.to_string()).collect();
                s.push_str(&format!(
                    "| {} | {} | {} | {} | {:.*} | ±{} | {} |\n",
                    f.name,
                    values.join(", "),
                    c.measure,
                    c.expected,
                    p,
                    c.actual,
                    c.tolerance,
                    if c.passed() { "yes" } else { "no" }
                ));
            }
            s
        }
    };
    emit(None, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Plotdata(a) => cmd_plotdata(a),
        Command::Fixtures(a) => cmd_fixtures(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sqfr: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
