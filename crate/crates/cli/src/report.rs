//! Report files: a JSON envelope `{"config", "report", "version"}` and CSV
//! bound tables (header row, LF line endings).

use std::fs;
use std::io;
use std::path::Path;

use qswitch_core::bounds::BoundReport;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys whose values depend on timing and are excluded from determinism checks.
pub const TIMING_KEYS: [&str; 3] = ["wall_time", "instances_per_second", "speedup"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Envelope<C, R> {
    pub config: C,
    pub report: R,
    pub version: String,
}

impl<C, R> Envelope<C, R> {
    pub fn new(config: C, report: R) -> Self {
        Self {
            config,
            report,
            version: VERSION.to_string(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, ReportError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Serializes `rows` as CSV with a header row.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<String, ReportError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn bound_rows_csv(rows: &[BoundReport]) -> Result<String, ReportError> {
    to_csv(rows)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    fs::write(path, contents)?;
    Ok(())
}

/// Removes timing-dependent keys at any depth.
pub fn strip_timing(value: &mut Value) {
    match value {
        Value::Object(map) => {
            for key in TIMING_KEYS {
                map.remove(key);
            }
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
