//! Report rows and their JSON and CSV serializations.
//!
//! Schema version 1. Every row carries the experiment id, the seed and the
//! SHA-256 hash of the full experiment configuration.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Version of the report schema.
pub const SCHEMA_VERSION: u32 = 1;

/// One reported quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub quantity: String,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub theory: Option<f64>,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    /// How `pass` was decided.
    pub verdict: String,
    pub seed: u64,
    pub config_hash: String,
}

impl ReportRow {
    /// A row with only the identifying fields set.
    pub fn new(experiment: &str, quantity: &str, seed: u64, config_hash: &str) -> Self {
        Self {
            experiment: experiment.into(),
            quantity: quantity.into(),
            estimate: None,
            stderr: None,
            theory: None,
            bound: None,
            pass: None,
            verdict: String::new(),
            seed,
            config_hash: config_hash.into(),
        }
    }

    /// Sets the estimate and its standard error.
    pub fn estimate(mut self, value: f64, stderr: f64) -> Self {
        self.estimate = Some(value);
        self.stderr = Some(stderr);
        self
    }

    /// Sets the theory value.
    pub fn theory(mut self, value: f64) -> Self {
        self.theory = Some(value);
        self
    }

    /// Sets the bound value.
    pub fn bound(mut self, value: f64) -> Self {
        self.bound = Some(value);
        self
    }

    /// Sets the verdict.
    pub fn verdict(mut self, pass: bool, how: impl Into<String>) -> Self {
        self.pass = Some(pass);
        self.verdict = how.into();
        self
    }

    /// Sets an informational note without a verdict.
    pub fn note(mut self, how: impl Into<String>) -> Self {
        self.verdict = how.into();
        self
    }
}

/// A single-run report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub metadata: BTreeMap<String, String>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// A report holding `rows`.
    pub fn new(rows: Vec<ReportRow>) -> Self {
        Self { schema_version: SCHEMA_VERSION, metadata: BTreeMap::new(), rows }
    }

    /// Whether no row failed.
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    /// Writes pretty JSON.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }

    /// Writes the rows as CSV with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes JSON or CSV according to the file extension.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        if path.extension().is_some_and(|e| e == "csv") {
            self.write_csv(file)
        } else {
            self.write_json(file)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_rows() {
        let r = Report::new(vec![ReportRow::new("x", "q", 1, "h").estimate(0.5, 0.1).verdict(true, "ok")]);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("experiment,quantity,estimate"));
        assert_eq!(text.lines().count(), 2);
        assert!(r.passed());
    }
}
