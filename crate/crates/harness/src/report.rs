//! `report.json` and CSV tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::Config;
use crate::fit::Fitted;
use crate::scenario::ScenarioEcho;

/// One pass/fail comparison.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    /// Table holding the data behind the check.
    pub table: String,
    /// The mathematical statement being tested.
    pub property: String,
    pub observed: f64,
    pub threshold: f64,
    /// How `observed` is compared with `threshold`.
    pub relation: String,
    pub passed: bool,
}

impl Check {
    /// `observed <= threshold`.
    pub fn at_most(name: &str, property: &str, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            table: String::new(),
            property: property.into(),
            observed,
            threshold,
            relation: "<=".into(),
            passed: observed <= threshold,
        }
    }

    /// `observed >= threshold`.
    pub fn at_least(name: &str, property: &str, observed: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            table: String::new(),
            property: property.into(),
            observed,
            threshold,
            relation: ">=".into(),
            passed: observed >= threshold,
        }
    }

    /// `observed == threshold` exactly.
    pub fn equals(name: &str, property: &str, observed: f64, expected: f64) -> Self {
        Check {
            name: name.into(),
            table: String::new(),
            property: property.into(),
            observed,
            threshold: expected,
            relation: "==".into(),
            passed: observed == expected,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Column {
    pub name: String,
    pub description: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableMeta {
    pub file: String,
    pub rows: usize,
    pub columns: Vec<Column>,
}

/// A CSV table with a column legend.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, legend: &[(&str, &str)]) -> Self {
        Table {
            name: name.into(),
            columns: legend.iter().map(|(n, d)| Column { name: (*n).into(), description: (*d).into() }).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn meta(&self) -> TableMeta {
        TableMeta { file: self.file_name(), rows: self.rows.len(), columns: self.columns.clone() }
    }

    /// Column values of row `r` by name.
    pub fn get(&self, r: usize, column: &str) -> Option<&str> {
        let c = self.columns.iter().position(|c| c.name == column)?;
        self.rows.get(r).map(|row| row[c].as_str())
    }
}

/// Formats a cell. Rust's shortest round-trip float formatting keeps
/// output byte-identical across runs.
pub fn cell<T: ToString>(v: T) -> String {
    v.to_string()
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub scenario: ScenarioEcho,
    pub seed: u64,
    pub config: Config,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub fitted: BTreeMap<String, Fitted>,
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub tables: Vec<TableMeta>,
}

/// A finished campaign.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.report.passed
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.report.checks.iter().find(|c| c.name == name)
    }

    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `report.json` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            let mut w = csv::Writer::from_path(dir.join(t.file_name()))?;
            w.write_record(t.columns.iter().map(|c| c.name.as_str()))?;
            for r in &t.rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        fs::write(dir.join("report.json"), self.report_json())
    }
}
