//! Self-describing result reports and their CSV and JSON encodings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Null,
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u16> for Value {
    fn from(v: u16) -> Self {
        Value::Int(i64::from(v))
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(i64::from(v))
    }
}

impl From<i32> for Value {
    fn from(v: i32) -> Self {
        Value::Int(i64::from(v))
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub version: String,
    pub seed: u64,
    /// Effective settings, sorted by key.
    pub config: BTreeMap<String, String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        Self {
            experiment: experiment.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn metadata(&self, table: &str) -> String {
        let mut out = format!(
            "# experiment: {}\n# version: {}\n# seed: {}\n",
            self.experiment, self.version, self.seed
        );
        for (k, v) in &self.config {
            out.push_str(&format!("# config: {k}={v}\n"));
        }
        out.push_str(&format!("# table: {table}\n"));
        out
    }

    /// One CSV document for `table`, metadata comment lines first.
    pub fn csv(&self, table: &Table) -> Result<String, CliError> {
        let mut out = self.metadata(&table.name).into_bytes();
        {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            w.write_record(&table.columns).map_err(csv_error)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Value::csv_field)).map_err(csv_error)?;
            }
            w.flush().map_err(|e| CliError::Io(e.to_string()))?;
        }
        String::from_utf8(out).map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Writes the report; returns the files written.
    ///
    /// JSON goes to one file. CSV writes the first table to `out` and every
    /// further table to `<stem>.<table>.csv` beside it. Without `out` all
    /// tables go to stdout.
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
        match (format, out) {
            (Format::Json, Some(path)) => {
                write_file(path, &self.json()?)?;
                Ok(vec![path.to_path_buf()])
            }
            (Format::Json, None) => {
                print(&self.json()?)?;
                Ok(Vec::new())
            }
            (Format::Csv, Some(path)) => {
                let mut written = Vec::new();
                for (i, t) in self.tables.iter().enumerate() {
                    let target = if i == 0 {
                        path.to_path_buf()
                    } else {
                        sibling(path, &t.name)
                    };
                    write_file(&target, &self.csv(t)?)?;
                    written.push(target);
                }
                Ok(written)
            }
            (Format::Csv, None) => {
                let parts: Vec<String> = self.tables.iter().map(|t| self.csv(t)).collect::<Result<_, _>>()?;
                print(&parts.join("\n"))?;
                Ok(Vec::new())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `runs/out.csv` with table `summary` becomes `runs/out.summary.csv`.
pub fn sibling(path: &Path, table: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = path
        .extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "csv".into());
    path.with_file_name(format!("{stem}.{table}.{ext}"))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn print(contents: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(contents.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|e| CliError::Io(e.to_string()))
}
