//! Result records and their text, CSV and JSON renderings.
//!
//! Numbers are written with 17 significant digits in CSV and with the
//! shortest round-tripping representation in JSON, so both encodings read
//! back to the same `f64` values.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// A table cell or scalar value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Num(x as f64)
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

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Output format selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Everything a command produced. Wall time is reported separately on
/// stderr so that the payload is reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub version: String,
    pub inputs: BTreeMap<String, Cell>,
    pub outputs: BTreeMap<String, Cell>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(skip)]
    pub text: Vec<String>,
}

impl ResultRecord {
    pub fn new(command: &str) -> Self {
        ResultRecord {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            text: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, v: impl Into<Cell>) -> &mut Self {
        self.inputs.insert(key.to_string(), v.into());
        self
    }

    pub fn output(&mut self, key: &str, v: impl Into<Cell>) -> &mut Self {
        self.outputs.insert(key.to_string(), v.into());
        self
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.text.push(s.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Csv => self.render_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("records serialize");
                s.push('\n');
                s
            }
        }
    }

    /// The table if there is one, otherwise the outputs as a single row.
    pub fn render_csv(&self) -> String {
        let mut s = String::new();
        if self.columns.is_empty() {
            let keys: Vec<&str> = self.outputs.keys().map(String::as_str).collect();
            let vals: Vec<String> = self.outputs.values().map(Cell::csv).collect();
            let _ = writeln!(s, "{}", keys.join(","));
            let _ = writeln!(s, "{}", vals.join(","));
        } else {
            let _ = writeln!(s, "{}", self.columns.join(","));
            for row in &self.rows {
                let vals: Vec<String> = row.iter().map(Cell::csv).collect();
                let _ = writeln!(s, "{}", vals.join(","));
            }
        }
        s
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        if self.text.is_empty() {
            for (k, v) in &self.outputs {
                match v {
                    Cell::Num(x) => {
                        let _ = writeln!(s, "{k} = {x:.12e}");
                    }
                    Cell::Text(t) => {
                        let _ = writeln!(s, "{k} = {t}");
                    }
                }
            }
            if !self.columns.is_empty() {
                s.push_str(&self.render_csv());
            }
        } else {
            for l in &self.text {
                let _ = writeln!(s, "{l}");
            }
        }
        s
    }
}

/// Parses CSV written by [`ResultRecord::render_csv`] back into cells.
pub fn parse_csv(s: &str) -> (Vec<String>, Vec<Vec<Cell>>) {
    let mut lines = s.lines();
    let header = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .map(|f| f.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(f.to_string())))
                .collect()
        })
        .collect();
    (header, rows)
}
