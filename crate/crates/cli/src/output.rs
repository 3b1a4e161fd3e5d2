use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::tasks::Outcome;

/// Where a run writes its files. The summary defaults to the report path
/// with a `.txt` extension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Destinations {
    pub report: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Destinations {
    pub fn summary_path(&self) -> Option<PathBuf> {
        self.summary
            .clone()
            .or_else(|| self.report.as_ref().map(|r| r.with_extension("txt")))
    }

    pub fn write(&self, outcome: &Outcome) -> Result<(), CliError> {
        if let Some(path) = &self.report {
            write_file(path, &outcome.report)?;
        }
        if let Some(path) = self.summary_path() {
            write_file(&path, &outcome.summary)?;
        }
        if let Some(path) = &self.csv {
            match &outcome.csv {
                Some(text) => write_file(path, text)?,
                None => {
                    return Err(CliError::Input(
                        "this task produces no CSV table".to_string(),
                    ))
                }
            }
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}
