//! Reports and their CSV/JSON files.
//!
//! Floats are written in the shortest form that reads back to the same bits
//! (`{:?}` for CSV, ryu through `serde_json` for JSON), so identical runs give
//! identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Text(String::new()), Into::into)
    }
}

impl Cell {
    fn plain(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn csv(&self) -> String {
        let s = self.plain();
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s
        }
    }

    /// Non-finite floats become the strings `inf`, `-inf` and `NaN`.
    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or_else(|| Value::String(format!("{v:?}")), Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Flag(b) => Value::Bool(*b),
        }
    }
}

/// Formats a list of floats as one comma-separated cell.
pub fn list(v: &[f64]) -> Cell {
    Cell::Text(v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","))
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Table { name, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {}", self.name);
        self.rows.push(row);
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub parameters: Vec<(&'static str, Cell)>,
    pub summary: Vec<(String, Cell)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report { command, parameters: Vec::new(), summary: Vec::new(), tables: Vec::new() }
    }

    pub fn param(&mut self, key: &'static str, v: impl Into<Cell>) {
        self.parameters.push((key, v.into()));
    }

    pub fn note(&mut self, key: impl Into<String>, v: impl Into<Cell>) {
        self.summary.push((key.into(), v.into()));
    }

    pub fn plan_text(&self) -> String {
        let mut s = format!("{} (dry run)\n", self.command);
        for (k, v) in &self.parameters {
            s += &format!("  {k} = {}\n", v.plain());
        }
        for (k, v) in &self.summary {
            s += &format!("  {k}: {}\n", v.plain());
        }
        s
    }

    pub fn summary_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        for (k, v) in &self.summary {
            s += &format!("  {k}: {}\n", v.plain());
        }
        s
    }

    fn csv_files(&self, dir: &Path, stem: &str) -> Vec<(PathBuf, String)> {
        let mut files = Vec::new();
        for (i, t) in self.tables.iter().enumerate() {
            let name = if i == 0 { format!("{stem}.csv") } else { format!("{stem}.{}.csv", t.name) };
            let mut text = t.columns.join(",") + "\n";
            for row in &t.rows {
                text += &row.iter().map(Cell::csv).collect::<Vec<_>>().join(",");
                text.push('\n');
            }
            files.push((dir.join(name), text));
        }
        let mut text = String::from("section,key,value\n");
        for (k, v) in &self.parameters {
            text += &format!("parameter,{k},{}\n", v.csv());
        }
        for (k, v) in &self.summary {
            text += &format!("summary,{},{}\n", Cell::Text(k.clone()).csv(), v.csv());
        }
        files.push((dir.join(format!("{stem}.summary.csv")), text));
        files
    }

    fn json_text(&self) -> String {
        let pairs = |items: &mut dyn Iterator<Item = (String, Value)>| -> Value { Value::Object(items.collect::<Map<_, _>>()) };
        let tables = self.tables.iter().map(|t| {
            let columns = Value::from(t.columns.iter().map(|c| Value::from(*c)).collect::<Vec<_>>());
            let rows = Value::from(t.rows.iter().map(|r| Value::from(r.iter().map(Cell::json).collect::<Vec<_>>())).collect::<Vec<_>>());
            let mut m = Map::new();
            m.insert("columns".into(), columns);
            m.insert("rows".into(), rows);
            (t.name.to_string(), Value::Object(m))
        });
        let mut root = Map::new();
        root.insert("command".into(), Value::from(self.command));
        root.insert("parameters".into(), pairs(&mut self.parameters.iter().map(|(k, v)| (k.to_string(), v.json()))));
        root.insert("summary".into(), pairs(&mut self.summary.iter().map(|(k, v)| (k.clone(), v.json()))));
        root.insert("tables".into(), pairs(&mut tables.into_iter()));
        let mut s = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values are always serializable");
        s.push('\n');
        s
    }

    /// Writes the report and returns the paths written, in order.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::config("out-dir", format!("cannot create {}: {e}", dir.display())))?;
        let files = match format {
            Format::Csv => self.csv_files(dir, stem),
            Format::Json => vec![(dir.join(format!("{stem}.json")), self.json_text())],
        };
        for (path, text) in &files {
            fs::File::create(path)
                .and_then(|mut f| f.write_all(text.as_bytes()))
                .map_err(|e| CliError::config("out-dir", format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(files.into_iter().map(|(p, _)| p).collect())
    }
}
