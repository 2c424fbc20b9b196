use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// Each variant belongs to one category; the CLI maps the category to its
/// exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("routing error: node {node} is unreachable from {from}")]
    Unreachable { from: usize, node: usize },

    #[error("undefined value: {0}")]
    Undefined(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported {what} version {found} (expected {expected})")]
    Version {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short category name, used for CLI diagnostics.
    pub fn category(&self) -> &'static str {
        match self {
            Error::Input(_) => "input",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Unreachable { .. } => "routing",
            Error::Undefined(_) => "undefined",
            Error::Config(_) => "config",
            Error::Version { .. } => "version",
            Error::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => 2,
            Error::Parse { .. } => 3,
            Error::Validation(_) => 4,
            Error::Unreachable { .. } => 5,
            Error::Undefined(_) => 6,
            Error::Config(_) => 7,
            Error::Version { .. } => 8,
            Error::Io { .. } => 9,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(source) => Error::Io {
                path: PathBuf::from("<csv>"),
                source,
            },
            kind => Error::Parse {
                line,
                message: csv_kind_message(kind),
            },
        }
    }
}

fn csv_kind_message(kind: csv::ErrorKind) -> String {
    match kind {
        csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        csv::ErrorKind::Utf8 { err, .. } => err.to_string(),
        other => format!("{other:?}"),
    }
}
