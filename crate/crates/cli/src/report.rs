//! Report envelope, table rendering and atomic output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    AssertionFailed,
}

/// What every command emits. `config` echoes the fully resolved input.
#[derive(Debug, Serialize)]
pub struct Report<C, R> {
    pub command: &'static str,
    pub status: Status,
    pub config: C,
    pub result: R,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// Human-readable rendering of a command result.
pub trait Table {
    fn table(&self, out: &mut String);
}

impl<C: Serialize, R: Serialize + Table> Report<C, R> {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self)
                    .map_err(|e| CliError::Invariant(format!("report serialization: {e}")))?;
                s.push('\n');
                Ok(s)
            }
            Format::Table => {
                let mut s = String::new();
                let _ = writeln!(s, "{}: {}", self.command, status_word(self.status));
                self.result.table(&mut s);
                for d in &self.diagnostics {
                    let _ = writeln!(s, "! {d}");
                }
                if let Some(ms) = self.elapsed_ms {
                    let _ = writeln!(s, "elapsed: {ms} ms");
                }
                Ok(s)
            }
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::AssertionFailed => "ASSERTION FAILED",
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let err = |source| CliError::Output {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Left-aligned columns.
pub fn columns(out: &mut String, rows: &[Vec<String>]) {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c + 1 == row.len() {
                line.push_str(cell);
            } else {
                let _ = write!(line, "{cell:<w$}  ", w = widths[c]);
            }
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
}
