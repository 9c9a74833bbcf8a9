//! Tables and their CSV/JSON encodings.
//!
//! Floats are always written as `{:.16e}` (17 significant digits), so every
//! finite value survives a write/parse round trip bit for bit. Non-finite
//! values become `NaN`, `inf`, `-inf` in CSV and `null` in JSON.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

macro_rules! int_cells {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cells!(i32, i64, u32, u64, usize, u128);

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn from_csv(s: &str) -> Cell {
        match s {
            "true" => return Cell::Bool(true),
            "false" => return Cell::Bool(false),
            "NaN" => return Cell::Float(f64::NAN),
            "inf" => return Cell::Float(f64::INFINITY),
            "-inf" => return Cell::Float(f64::NEG_INFINITY),
            _ => {}
        }
        if let Ok(v) = s.parse::<i128>() {
            return Cell::Int(v);
        }
        if s.contains('e') {
            if let Ok(v) = s.parse::<f64>() {
                return Cell::Float(v);
            }
        }
        Cell::Text(s.to_string())
    }

    fn from_json(v: &Value) -> Cell {
        match v {
            Value::Null => Cell::Float(f64::NAN),
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => match (n.as_i64(), n.as_u64()) {
                (Some(i), _) => Cell::Int(i as i128),
                (None, Some(u)) => Cell::Int(u as i128),
                _ => Cell::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => Cell::Text(s.clone()),
            other => Cell::Text(other.to_string()),
        }
    }

    /// Equal, treating two NaNs as equal.
    pub fn same(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Float(a), Cell::Float(b)) => a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()),
            _ => self == other,
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i128(*v),
            Cell::Float(v) => s.serialize_f64(*v),
            Cell::Bool(v) => s.serialize_bool(*v),
            Cell::Text(v) => s.serialize_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn same(&self, other: &Table) -> bool {
        self.name == other.name
            && self.columns == other.columns
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("write to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 cells")
    }

    pub fn from_csv(name: &str, text: &str) -> io::Result<Table> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let columns = r.headers().map_err(io::Error::other)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(io::Error::other)?.iter().map(Cell::from_csv).collect());
        }
        Ok(Table { name: name.into(), columns, rows })
    }

    pub fn from_json(v: &Value) -> io::Result<Table> {
        let bad = || io::Error::new(io::ErrorKind::InvalidData, "malformed table");
        let name = v.get("name").and_then(Value::as_str).ok_or_else(bad)?;
        let columns = v
            .get("columns")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|c| c.as_str().map(String::from).ok_or_else(bad))
            .collect::<io::Result<_>>()?;
        let rows = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|r| r.as_array().map(|cells| cells.iter().map(Cell::from_json).collect()).ok_or_else(bad))
            .collect::<io::Result<_>>()?;
        Ok(Table { name: name.into(), columns, rows })
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("name", &self.name)?;
        m.serialize_entry("columns", &self.columns)?;
        m.serialize_entry("rows", &self.rows)?;
        m.end()
    }
}

/// One checked statement.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Assertion {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn line(&self) -> String {
        format!("criterion {:>2} {} {}: {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RunReport {
    pub format: &'static str,
    pub version: u32,
    pub subcommand: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub assertions: Vec<Assertion>,
    pub tables: Vec<Table>,
    pub all_passed: bool,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn new(subcommand: &str, config: ExperimentConfig, assertions: Vec<Assertion>, tables: Vec<Table>, wall: f64) -> Self {
        let all_passed = assertions.iter().all(|a| a.passed);
        RunReport {
            format: "cdlab-report",
            version: 1,
            subcommand: subcommand.into(),
            seed: config.seed,
            config,
            assertions,
            tables,
            all_passed,
            wall_clock_seconds: wall,
        }
    }

    pub fn assertion_table(&self) -> Table {
        let mut t = Table::new("assertions", &["id", "name", "passed", "detail"]);
        for a in &self.assertions {
            t.push(vec![a.id.into(), a.name.as_str().into(), a.passed.into(), a.detail.as_str().into()]);
        }
        t
    }
}

struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_float(v).as_bytes())
    }
}

/// Compact JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits);
    value.serialize(&mut ser).expect("serialize to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

/// CSV: one file per table plus `assertions.csv` and `run.cfg`. JSON: `report.json`.
pub fn write_results(report: &RunReport, format: Format, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    match format {
        Format::Json => fs::write(dir.join("report.json"), to_json(report)),
        Format::Csv => {
            fs::write(dir.join("run.cfg"), report.config.to_key_values())?;
            fs::write(dir.join("assertions.csv"), report.assertion_table().to_csv())?;
            for t in &report.tables {
                fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
            }
            Ok(())
        }
    }
}
