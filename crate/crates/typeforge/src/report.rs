//! Skip reports written as JSON lines.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One input line that was skipped, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipRecord {
    pub file: String,
    pub line: u64,
    pub reason: String,
}

impl SkipRecord {
    pub fn new(file: &Path, line: u64, reason: impl Into<String>) -> Self {
        Self {
            file: file.display().to_string(),
            line,
            reason: reason.into(),
        }
    }
}

/// Writes any serializable records, one JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = crate::io::create_writer(path)?;
    for r in records {
        serde_json::to_writer(&mut w, &r).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
