//! Run reports: a versioned JSON object per run plus CSV emission helpers.
//!
//! JSON objects serialize with sorted keys (serde_json's default map), so a
//! report is byte-identical across runs up to the wall-clock field, which is
//! excluded from determinism comparisons.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA: &str = "lgt-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub runtime_ms: u64,
}

impl RunReport {
    pub fn new(
        command: &str,
        params: impl Serialize,
        results: impl Serialize,
        runtime_ms: u64,
    ) -> Result<Self> {
        Ok(RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            params: serde_json::to_value(params)?,
            results: serde_json::to_value(results)?,
            runtime_ms,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with the wall-clock field removed; two runs with the same seed
    /// must agree on this byte-for-byte.
    pub fn determinism_key(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Value::Object(map) = &mut v {
            map.remove("runtime_ms");
        }
        Ok(serde_json::to_string(&v)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// Writes a CSV file: UTF-8, one header row, '.' decimal separator, no
/// thousands separators. A trailing footer line (prefixed with `#`) may
/// carry summary values.
pub fn write_csv(
    path: &Path,
    header: &str,
    rows: impl IntoIterator<Item = String>,
    footer: Option<String>,
) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{header}")?;
    for row in rows {
        writeln!(f, "{row}")?;
    }
    if let Some(footer) = footer {
        writeln!(f, "# {footer}")?;
    }
    Ok(())
}
