use std::io::Write;

use anyhow::Result;
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows of string cells under named columns.
pub struct Table {
    columns: Vec<String>,
    /// Columns kept as JSON strings even when they look numeric.
    text: Vec<bool>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(columns: I) -> Self {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        Self {
            text: vec![false; columns.len()],
            columns,
            rows: Vec::new(),
        }
    }

    pub fn text<const K: usize>(mut self, names: [&str; K]) -> Self {
        for (c, t) in self.columns.iter().zip(&mut self.text) {
            *t |= names.contains(&c.as_str());
        }
        self
    }

    pub fn all_text(mut self) -> Self {
        self.text.fill(true);
        self
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        let row: Vec<String> = row.into_iter().collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()?;
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .columns
                            .iter()
                            .zip(&self.text)
                            .zip(row)
                            .map(|((name, &text), c)| {
                                (name.clone(), if text { Value::String(c.clone()) } else { json_cell(c) })
                            })
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut out = out;
                serde_json::to_writer_pretty(&mut out, &records)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}

/// Numbers and booleans keep their JSON types; everything else is a string.
fn json_cell(cell: &str) -> Value {
    if let Ok(b) = cell.parse::<bool>() {
        return Value::Bool(b);
    }
    if let Ok(i) = cell.parse::<i64>() {
        return Value::from(i);
    }
    match cell.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        _ => Value::String(cell.to_string()),
    }
}
