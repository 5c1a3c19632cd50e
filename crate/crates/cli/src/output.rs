//! Tabular output as CSV or JSON with fixed, locale-free number formatting.

use serde_json::{Map, Number, Value};

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Clone, Debug)]
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| csv_cell(c, precision)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, precision: usize) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.to_string(), json_cell(cell, precision));
                }
                Value::Object(obj)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&Value::Array(rows)).expect("plain JSON values serialize");
        text.push('\n');
        text
    }
}

fn csv_cell(cell: &Cell, precision: usize) -> String {
    match cell {
        Cell::Int(n) => n.to_string(),
        Cell::Float(x) => fmt_sig(*x, precision),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(cell: &Cell, precision: usize) -> Value {
    match cell {
        Cell::Int(n) => Value::from(*n),
        Cell::Float(x) => fmt_sig(*x, precision)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

/// `x` rounded to `digits` significant digits; positional notation for
/// moderate magnitudes, scientific otherwise.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if (-5..16).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let rounded: f64 = sci.parse().unwrap_or(x);
        format!("{:.*}", decimals, rounded)
    } else {
        sci
    }
}
