//! Table emission: aligned stdout, CSV, and JSON with identical values.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use werner_core::round_sig12;

/// One table cell.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(i64),
    Float(f64),
    Flag(Option<bool>),
}

impl Cell {
    pub fn float(x: f64) -> Self {
        Cell::Float(round_sig12(x))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format!("{x:.11e}"),
            Cell::Flag(Some(b)) => b.to_string(),
            Cell::Flag(None) => String::new(),
        }
    }

    fn display(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x}"),
            other => other.csv(),
        }
    }
}

pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: Vec<&'static str>) -> Self {
        Table {
            headers,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let objects: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| {
                self.headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), serde_json::to_value(c).unwrap()))
                    .collect()
            })
            .collect();
        serde_json::to_string_pretty(&objects).unwrap()
    }

    pub fn render_stdout(&self) -> String {
        let mut widths: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(Cell::display).collect())
            .collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for (w, h) in widths.iter().zip(&self.headers) {
            let _ = write!(out, "{h:>w$}  ");
        }
        out.push('\n');
        for row in rendered {
            for (w, cell) in widths.iter().zip(row) {
                let _ = write!(out, "{cell:>w$}  ");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path, format: crate::Format) -> std::io::Result<()> {
        let body = match format {
            crate::Format::Csv => self.to_csv(),
            crate::Format::Json => self.to_json(),
        };
        std::fs::write(path, body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_carry_identical_values() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::float(1.0 / 3.0), Cell::Int(7)]);
        let csv = t.to_csv();
        let json = t.to_json();
        let csv_val: f64 = csv.lines().nth(1).unwrap().split(',').next().unwrap().parse().unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        let json_val = parsed[0]["a"].as_f64().unwrap();
        assert_eq!(csv_val, json_val);
    }
}
