//! Tabular data, its CSV form and the JSON report wrapper.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use hookeon::{Tolerances, UnitSystem, ValidatedParams};
use serde::Serialize;
use serde_json::{json, Value};

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Comma-separated with a header row; every number has 17 significant
    /// digits so the text parses back to the same bits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_number(*v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .with_context(|| format!("row {}", i + 1))?;
            if row.len() != columns.len() {
                bail!("row {} has {} fields, expected {}", i + 1, row.len(), columns.len());
            }
            rows.push(row);
        }
        Ok(Table { columns, rows })
    }

    pub fn to_json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

/// Run metadata attached to every JSON document.
#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub version: &'static str,
    pub command: &'a str,
    pub units: UnitSystem,
    pub params: &'a ValidatedParams,
    pub tolerances: &'a Tolerances,
}

impl Report<'_> {
    pub fn with(&self, body: Value) -> Value {
        let mut head = serde_json::to_value(self).expect("report fields serialize");
        if let (Value::Object(head), Value::Object(body)) = (&mut head, body) {
            head.extend(body);
        }
        head
    }
}

/// Opens the data destination: the given path, or standard output.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<W: Write>(mut out: W, value: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.1 + 0.2, -1.0 / 3.0]);
        t.push(vec![f64::MIN_POSITIVE, 6.02214076e23]);
        t.push(vec![-0.0, 5e-324]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = Table::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.columns, t.columns);
        for (x, y) in back.rows.iter().flatten().zip(t.rows.iter().flatten()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(Table::read_csv("a,b\n1,2\n3\n".as_bytes()).is_err());
        assert!(Table::read_csv("a\nx\n".as_bytes()).is_err());
    }
}
