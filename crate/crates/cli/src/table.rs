use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnType {
    Integer,
    Number,
    Text,
}

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: ColumnType,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

/// How numbers are written in CSV. JSON always carries full precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    Significant(usize),
    Full,
    Decimals(usize),
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub params: Value,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, params: Value, columns: &[(&str, ColumnType, &str)]) -> Self {
        let columns = columns
            .iter()
            .map(|&(name, kind, description)| Column {
                name: name.to_string(),
                kind,
                description: description.to_string(),
            })
            .collect();
        Self {
            command,
            params,
            columns,
            rows: Vec::new(),
        }
    }

    /// Column names are chosen at run time (one block per ε in `table1`).
    pub fn with_columns(command: &'static str, params: Value, columns: Vec<Column>) -> Self {
        Self {
            command,
            params,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn schema_line(&self) -> String {
        let kinds: Vec<String> = self
            .columns
            .iter()
            .map(|c| {
                let kind = serde_json::to_value(c.kind).unwrap();
                format!("{}:{}", c.name, kind.as_str().unwrap())
            })
            .collect();
        kinds.join(",")
    }

    pub fn write_csv<W: Write>(&self, out: W, precision: Precision) -> Result<(), CliError> {
        let mut out = out;
        writeln!(out, "# deqjump {}", self.command)?;
        writeln!(
            out,
            "# params: {}",
            serde_json::to_string(&self.params).unwrap()
        )?;
        writeln!(out, "# schema: {}", self.schema_line())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            w.write_record(row.iter().map(|cell| match cell {
                Cell::Int(v) => v.to_string(),
                Cell::Num(v) => format_number(*v, precision),
                Cell::Text(s) => s.clone(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| {
                        let v = match cell {
                            Cell::Int(v) => Value::from(*v),
                            Cell::Num(v) => Value::from(*v),
                            Cell::Text(s) => Value::from(s.as_str()),
                        };
                        (c.name.clone(), v)
                    })
                    .collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::json!({
            "params": self.params,
            "schema": self.columns,
            "rows": rows,
        })
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(std::io::Error::from)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Plain decimal in `[1e-4, 1e15)`, scientific otherwise, so every cell parses
/// back as an `f64`.
pub fn format_number(v: f64, precision: Precision) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    match precision {
        Precision::Decimals(d) => format!("{v:.d$}"),
        Precision::Full => plain_or_scientific(v, None),
        Precision::Significant(digits) => plain_or_scientific(v, Some(digits.max(1))),
    }
}

fn plain_or_scientific(v: f64, digits: Option<usize>) -> String {
    let v = match digits {
        Some(d) => format!("{:.*e}", d - 1, v).parse::<f64>().unwrap(),
        None => v,
    };
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
