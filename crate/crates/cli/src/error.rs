use std::path::PathBuf;

use thiserror::Error;

/// Anything that stops a run before a report is produced. All map to exit
/// status 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Scenario { path: String, message: String },
    #[error("{}{what}: {message}", line_prefix(*.line))]
    Expression {
        what: String,
        line: Option<usize>,
        message: String,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Compute(#[from] measure_fourier::Error),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}
