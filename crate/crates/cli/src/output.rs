//! Report, table and timing files under an output prefix.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;
use crate::experiment::SweepRow;

#[derive(Clone, Debug, Default, Serialize)]
pub struct StepTiming {
    pub name: String,
    pub seconds: f64,
}

/// Wall-clock timings. Kept out of the report so reports stay byte-identical.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub steps: Vec<StepTiming>,
}

/// `<prefix>.<suffix>`, appended rather than replacing any extension.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| io_error(dir, e)),
        _ => Ok(()),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_error(path, e.into()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Writes the sweep table with every float at 17 significant digits.
pub fn write_table(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    ensure_parent(path)?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "lower", "upper", "expected_lower", "expected_upper", "parseval_distance"])?;
    for row in rows {
        let floats = [row.lower, row.upper, row.expected_lower, row.expected_upper, row.parseval_distance];
        let mut record = vec![row.n.to_string()];
        record.extend(floats.iter().map(|v| format!("{v:.16e}")));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| io_error(path, e))
}
