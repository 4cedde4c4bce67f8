//! Result tables, acceptance checks and their files on disk.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::Subcommand;
use crate::fit::RateFit;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// CSV text; floats carry 17 significant digits so values round-trip.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header of {}", self.name);
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<")]
    Below,
    #[serde(rename = ">")]
    Above,
}

/// One acceptance threshold and whether it held.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub passed: bool,
}

impl Check {
    pub fn compare(name: impl Into<String>, value: f64, relation: Relation, bound: f64) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= bound,
            Relation::AtLeast => value >= bound,
            Relation::Below => value < bound,
            Relation::Above => value > bound,
        };
        Self { name: name.into(), value: Some(value), relation: Some(relation), bound: Some(bound), passed }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::compare(name, value, Relation::AtMost, bound)
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::compare(name, value, Relation::AtLeast, bound)
    }

    pub fn holds(name: impl Into<String>, passed: bool) -> Self {
        Self { name: name.into(), value: None, relation: None, bound: None, passed }
    }

    pub fn describe(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        match (self.value, self.relation, self.bound) {
            (Some(v), Some(r), Some(b)) => {
                let op = match r {
                    Relation::AtMost => "<=",
                    Relation::AtLeast => ">=",
                    Relation::Below => "<",
                    Relation::Above => ">",
                };
                format!("{verdict} {}: {v:.6e} {op} {b:.6e}", self.name)
            }
            _ => format!("{verdict} {}", self.name),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedFit {
    pub name: String,
    #[serde(flatten)]
    pub fit: RateFit,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub subcommand: Subcommand,
    pub scenario: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub fits: Vec<NamedFit>,
}

#[derive(Serialize)]
struct Summary<'a> {
    subcommand: Subcommand,
    scenario: &'a str,
    passed: bool,
    checks: &'a [Check],
    fits: &'a [NamedFit],
    tables: Vec<String>,
}

impl Report {
    pub fn new(subcommand: Subcommand, scenario: &str) -> Self {
        Self { subcommand, scenario: scenario.into(), tables: Vec::new(), checks: Vec::new(), fits: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn fit(&mut self, name: &str, fit: RateFit) {
        self.fits.push(NamedFit { name: name.into(), fit });
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_json(&self) -> String {
        let summary = Summary {
            subcommand: self.subcommand,
            scenario: &self.scenario,
            passed: self.passed(),
            checks: &self.checks,
            fits: &self.fits,
            tables: self.tables.iter().map(|t| format!("{}.csv", t.name)).collect(),
        };
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    }

    /// Writes `<table>.csv` for every table and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for table in &self.tables {
            let mut out = io::BufWriter::new(fs::File::create(dir.join(format!("{}.csv", table.name)))?);
            table.write_csv(&mut out)?;
            out.flush()?;
        }
        fs::write(dir.join("summary.json"), self.summary_json() + "\n")
    }
}
