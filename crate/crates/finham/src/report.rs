//! Deterministic text output: ordered key=value summaries and columnar
//! field dumps. Rendering uses only value formatting, never timestamps or
//! absolute paths, so identical runs produce identical bytes.

use std::fmt::Display;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// Two aligned columns for reading.
    Table,
    /// One key=value pair per line for parsing.
    Structured,
}

impl ReportFormat {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "table" => Ok(ReportFormat::Table),
            "structured" => Ok(ReportFormat::Structured),
            other => Err(Error::invalid(
                "format",
                format!("expected table or structured, got {other}"),
            )),
        }
    }
}

/// Insertion-ordered list of key/value pairs.
#[derive(Debug, Clone, Default)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Summary::default()
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: ReportFormat) -> String {
        let mut out = String::new();
        match format {
            ReportFormat::Structured => {
                for (k, v) in &self.entries {
                    let _ = writeln!(out, "{k}={v}");
                }
            }
            ReportFormat::Table => {
                let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in &self.entries {
                    let _ = writeln!(out, "{k:width$}  {v}");
                }
            }
        }
        out
    }

    pub fn write_to(&self, path: &Path, format: ReportFormat) -> Result<()> {
        fs::write(path, self.render(format))?;
        Ok(())
    }
}

/// Writes a field as `x y value` rows after `# key = value` header lines.
/// One-dimensional fields carry a zero y column so the shape is uniform.
pub fn write_field_columnar<T: Real>(
    path: &Path,
    field: &Field<T>,
    header: &[(&str, String)],
) -> Result<()> {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "# {k} = {v}");
    }
    match field.grid() {
        Grid::One(g) => {
            for (i, x) in g.nodes().enumerate() {
                let _ = writeln!(out, "{x} 0 {}", field.at1(i));
            }
        }
        Grid::Two(g) => {
            for (j, y) in g.y.nodes().enumerate() {
                for (i, x) in g.x.nodes().enumerate() {
                    let _ = writeln!(out, "{x} {y} {}", field.at2(i, j));
                }
            }
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads the value column of a columnar dump back, in row-major order.
/// Coordinates are not reinterpreted; the caller supplies the grid.
pub fn read_columnar_values<T: Real>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let last = trimmed.split_whitespace().last().unwrap();
        let v: f64 = last.parse().map_err(|_| Error::Config {
            path: path.display().to_string(),
            line: lineno + 1,
            reason: format!("expected a number in the value column, got {last:?}"),
        })?;
        values.push(T::of(v));
    }
    Ok(values)
}
