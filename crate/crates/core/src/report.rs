//! Report-file schema and serialization. Reports are JSON with a stable
//! field order (struct fields and sorted maps) and floating-point numbers
//! written with 17 significant digits, so identical runs produce
//! byte-identical files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::audit::{RequirementResult, TheoremCheck};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Top-level report document for audit and theorem runs.
#[derive(Debug, Clone, Serialize)]
pub struct ReportFile {
    pub schema: u32,
    #[serde(rename = "tool-version")]
    pub tool_version: String,
    pub seed: u64,
    pub instance: String,
    pub requirements: BTreeMap<String, RequirementResult>,
    pub theorems: Vec<TheoremCheck>,
    #[serde(rename = "runtime-ms")]
    pub runtime_ms: u64,
}

impl ReportFile {
    pub fn new(instance: impl Into<String>, seed: u64) -> Self {
        ReportFile {
            schema: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            instance: instance.into(),
            requirements: BTreeMap::new(),
            theorems: Vec::new(),
            runtime_ms: 0,
        }
    }
}

// serde_json formatter printing every float with 17 significant digits.
struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no infinities; clamp to sentinel strings
            write!(writer, "\"{value}\"")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes any report value with the 17-significant-digit convention.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::domain(format!("serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| Error::domain(format!("non-utf8 report: {e}")))
}

/// Atomic write: temp file in the target directory, then rename.
pub fn write_atomically(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| "report".into()),
        std::process::id()
    ));
    std::fs::write(&tmp, contents)
        .map_err(|e| Error::domain(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| Error::domain(format!("cannot move report into place: {e}")))?;
    Ok(())
}
