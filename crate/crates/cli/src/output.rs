//! CSV tables and the JSON run summary.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so a table
//! round-trips every f64 exactly and two runs of the same config produce
//! identical bytes.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Table {
    path: PathBuf,
    writer: csv::Writer<File>,
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("writing {}: {e}", path.display()))
}

impl Table {
    pub fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)
            .map_err(|e| io_error(&path, e))?;
        writer.write_record(header).map_err(|e| io_error(&path, e))?;
        Ok(Table { path, writer })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.writer.write_record(fields).map_err(|e| io_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<String, CliError> {
        self.writer.flush().map_err(|e| io_error(&self.path, e))?;
        Ok(self
            .path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default())
    }
}

#[derive(Serialize)]
pub struct Summary<'a, R: Serialize> {
    pub version: &'static str,
    /// Resolved configuration; `cqc <kind> --config summary.json` reruns it.
    pub config: &'a ExperimentConfig,
    pub outputs: Vec<String>,
    pub results: R,
}

pub fn write_summary<R: Serialize>(
    dir: &Path,
    config: &ExperimentConfig,
    outputs: Vec<String>,
    results: R,
) -> Result<PathBuf, CliError> {
    let path = dir.join("summary.json");
    let summary = Summary {
        version: env!("CARGO_PKG_VERSION"),
        config,
        outputs,
        results,
    };
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| io_error(&path, e))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }
}
