//! Output files. Every file carries the config and its hash; nothing time-dependent is written.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::error::{CliError, Result};

/// Config with the output directory removed, so relocating a run does not change its identity.
pub fn provenance_view(config: &RunConfig) -> Value {
    let mut v = serde_json::to_value(config).expect("config serializes");
    if let Some(out) = v.get_mut("output").and_then(Value::as_object_mut) {
        out.remove("dir");
    }
    v
}

/// SHA-256 of the compact JSON of [`provenance_view`].
pub fn config_hash(config: &RunConfig) -> String {
    let text = provenance_view(config).to_string();
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A table of numeric or text cells.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Missing
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::from)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Collects the files of one run and writes them together with `meta.json`.
pub struct RunWriter<'a> {
    config: &'a RunConfig,
    command: String,
    hash: String,
    dir: PathBuf,
    files: Vec<String>,
    resolved: Map<String, Value>,
}

impl<'a> RunWriter<'a> {
    pub fn new(config: &'a RunConfig, command: &str) -> Result<Self> {
        let dir = config.output.dir.clone();
        fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        Ok(Self {
            config,
            command: command.to_owned(),
            hash: config_hash(config),
            dir,
            files: Vec::new(),
            resolved: Map::new(),
        })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Records a derived quantity for `meta.json`.
    pub fn resolve(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("value serializes");
        self.resolved.insert(key.to_owned(), v);
    }

    /// Writes `stem.csv` or `stem.json` depending on the configured format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<PathBuf> {
        match self.config.output.format {
            Format::Csv => {
                let name = format!("{stem}.csv");
                let body = self.csv(table).map_err(|e| CliError::Io {
                    path: self.dir.join(&name),
                    source: e.into(),
                })?;
                self.write(&name, &body)
            }
            Format::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect();
                let doc = json!({
                    "config_sha256": self.hash,
                    "config": provenance_view(self.config),
                    "columns": table.columns,
                    "rows": rows,
                });
                let body = serde_json::to_string_pretty(&doc).expect("table serializes") + "\n";
                self.write(&format!("{stem}.json"), &body)
            }
        }
    }

    fn csv(&self, table: &Table) -> Result<String, csv::Error> {
        let mut out = format!(
            "# config_sha256: {}\n# config: {}\n",
            self.hash,
            provenance_view(self.config)
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::text))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
        Ok(out)
    }

    fn write(&mut self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(CliError::io(&path))?;
        self.files.push(name.to_owned());
        Ok(path)
    }

    /// Writes `meta.json` and returns the list of files of the run.
    pub fn finish(mut self) -> Result<Vec<PathBuf>> {
        let meta = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "config_sha256": self.hash,
            "config": provenance_view(self.config),
            "resolved": Value::Object(std::mem::take(&mut self.resolved)),
            "files": self.files,
        });
        let body = serde_json::to_string_pretty(&meta).expect("meta serializes") + "\n";
        self.write("meta.json", &body)?;
        Ok(self.files.iter().map(|f| self.dir.join(f)).collect())
    }
}
