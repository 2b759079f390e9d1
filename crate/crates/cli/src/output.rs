//! Reports, CSV tables and where they are written.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::cli::Format;

/// Shortest round-trip decimal form; non-finite values as `nan`/`inf`/`-inf`.
pub fn float(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_string()
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A CSV table; cells are preformatted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn push_floats(&mut self, row: &[f64]) {
        self.push(row.iter().map(|v| float(*v)).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Result of one verb: exit code, JSON payload and optional table.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub code: u8,
    pub report: Value,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn new(code: u8, report: Value, table: Option<Table>) -> Self {
        Self {
            code,
            report,
            table,
        }
    }
}

pub fn to_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    text
}

/// Writes `<verb>.json` (and `<verb>.csv`) into `dir` and returns the text
/// for stdout in the requested format.
pub fn emit(verb: &str, outcome: &Outcome, format: Format, dir: Option<&Path>) -> Result<String> {
    let json = to_json(&outcome.report);
    let csv = outcome.table.as_ref().map(Table::to_csv);
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{verb}.json"));
        std::fs::write(&path, &json).with_context(|| format!("writing {}", path.display()))?;
        if let Some(csv) = &csv {
            let path = dir.join(format!("{verb}.csv"));
            std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(match (format, csv) {
        (Format::Csv, Some(csv)) => csv,
        _ => json,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e21, 0.0] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(0.1), "0.1");
        assert_eq!(float(f64::INFINITY), "inf");
        assert_eq!(float(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push_floats(&[1.0, 0.25]);
        assert_eq!(t.to_csv(), "a,b\n1.0,0.25\n");
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new(["x"]);
        t.push_floats(&[2.0]);
        let outcome = Outcome::new(0, serde_json::json!({"k": 1}), Some(t));
        let text = emit("demo", &outcome, Format::Csv, Some(dir.path())).unwrap();
        assert_eq!(text, "x\n2.0\n");
        assert!(dir.path().join("demo.json").exists());
        assert!(dir.path().join("demo.csv").exists());
    }
}
