use std::path::PathBuf;

use crate::dataset::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input is outside the mathematical domain of an operation
    /// (fewer than two groups, a negative aggregate, a Gini value outside [0, 1]).
    #[error("domain error: {0}")]
    Domain(String),

    /// The data is structurally unusable. Carries every error-level diagnostic found.
    #[error("validation failed: {}", join_diagnostics(.0))]
    Validation(Vec<Diagnostic>),

    /// Malformed input. `location` is a 1-based CSV row (`row 4`) or a JSON path (`$.components.q.A[2]`).
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// Bad flags, missing columns or an invalid scenario description.
    #[error("configuration error: {0}")]
    Config(String),

    /// A discard curve without thresholds: every pooled score is identical.
    #[error("no relevant thresholds: all pooled scores are identical")]
    NoThresholds,

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

fn join_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
