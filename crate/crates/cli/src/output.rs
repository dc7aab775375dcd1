// Copyright 2026 kerrsim contributors
// SPDX-License-Identifier: Apache-2.0

//! CSV reports and state dumps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use crate::config::ExperimentKind;
use crate::{ExpError, Result};
use kerrsim::C64;

/// Version of the CSV column layout, bumped on any change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Float(f64),
    Int(i64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// An embedded pass/fail assertion of an experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

/// Result of one experiment run.
#[derive(Clone, Debug)]
pub struct Report {
    pub experiment: ExperimentKind,
    pub metadata: Vec<(String, String)>,
    pub table: Table,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(experiment: ExperimentKind, table: Table) -> Self {
        Self { experiment, metadata: Vec::new(), table, checks: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Comment block, header row and data rows.
    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut w = w;
        writeln!(w, "# schema: kerrsim-{}/{SCHEMA_VERSION}", self.experiment).map_err(csv::Error::from)?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}").map_err(csv::Error::from)?;
        }
        for c in &self.checks {
            writeln!(w, "# check {}", c.line()).map_err(csv::Error::from)?;
        }
        let mut cw = csv::Writer::from_writer(w);
        cw.write_record(&self.table.columns)?;
        for row in &self.table.rows {
            cw.write_record(row.iter().map(Cell::render))?;
        }
        cw.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = create(path)?;
        self.write_csv(BufWriter::new(f))
    }
}

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| ExpError::Io { path: dir.to_path_buf(), source })?;
    }
    File::create(path).map_err(|source| ExpError::Io { path: path.to_path_buf(), source })
}

/// Matrix as nested JSON rows of `[re, im]` pairs.
pub fn matrix_json(m: &Array2<C64>) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> = m.rows().into_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect();
    serde_json::to_value(rows).expect("finite floats serialize")
}

pub fn write_matrix_json(m: &Array2<C64>, path: &Path) -> Result<()> {
    let f = create(path)?;
    serde_json::to_writer(BufWriter::new(f), &matrix_json(m))?;
    Ok(())
}
