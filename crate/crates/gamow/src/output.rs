//! CSV and JSON-lines writers. Every table starts with a provenance header.

use std::io::Write;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    /// One JSON object per line.
    Record,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Shortest round-trip form, exponent notation for small/large values.
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // Non-finite numbers have no JSON form; keep them as strings.
            Cell::Num(x) if !x.is_finite() => Value::String(x.to_string()),
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub warnings: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Provenance written ahead of every table.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: &'static str,
    pub config_hash: String,
    pub tolerances: String,
}

impl Header {
    fn line(&self) -> String {
        format!(
            "# gamow {} command={} config_hash={} tolerances={}",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.config_hash,
            self.tolerances
        )
    }
}

pub fn write_table(out: &mut dyn Write, header: &Header, table: &Table, format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "{}", header.line())?;
            for w in &table.warnings {
                writeln!(out, "# warning: {w}")?;
            }
            let mut writer = csv::Writer::from_writer(&mut *out);
            writer.write_record(&table.columns)?;
            for row in &table.rows {
                writer.write_record(row.iter().map(Cell::csv))?;
            }
            writer.flush()?;
        }
        Format::Record => {
            let head = json!({
                "kind": "header",
                "tool": "gamow",
                "version": env!("CARGO_PKG_VERSION"),
                "command": header.command,
                "config_hash": header.config_hash,
                "tolerances": header.tolerances,
            });
            writeln!(out, "{head}")?;
            for w in &table.warnings {
                writeln!(out, "{}", json!({"kind": "warning", "message": w}))?;
            }
            for row in &table.rows {
                let mut obj = Map::new();
                obj.insert("kind".into(), json!("row"));
                for (c, v) in table.columns.iter().zip(row) {
                    obj.insert((*c).into(), v.json());
                }
                writeln!(out, "{}", Value::Object(obj))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}
