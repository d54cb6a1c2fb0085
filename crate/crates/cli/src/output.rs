//! CSV tables and the JSON run manifest.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! results give byte-identical files. Files are written to a temporary name
//! and renamed into place, then read back and validated.

use crate::error::CliError;
use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "NCILW_OUT_DIR";

pub fn out_dir(flag: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Re-reads a CSV file and checks header and shape.
pub fn validate_csv(path: &Path, header: &[String]) -> Result<usize, CliError> {
    let bad = |message: String| CliError::OutputValidation { path: path.display().to_string(), message };
    let text = fs::read_to_string(path).map_err(io(path))?;
    let mut lines = text.lines();
    let got: Vec<&str> = lines.next().ok_or_else(|| bad("empty file".into()))?.split(',').collect();
    if got != header {
        return Err(bad(format!("header {got:?}, expected {header:?}")));
    }
    let mut n = 0;
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(bad(format!("row {i} has {} cells", cells.len())));
        }
        if let Some(c) = cells.iter().find(|c| c.parse::<f64>().is_err()) {
            return Err(bad(format!("row {i}: `{c}` is not a number")));
        }
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value < tolerance` (NaN fails).
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value < tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub subcommand: String,
    pub version: String,
    pub config: Value,
    pub status: String,
    pub error: Option<String>,
    pub wall_clock_seconds: f64,
    pub summary: Value,
    pub checks: Vec<Check>,
    pub outputs: Vec<String>,
}

/// Collects outputs for one run and writes them on `finish`.
pub struct RunWriter {
    dir: PathBuf,
    subcommand: String,
    config: Value,
    started: std::time::Instant,
    outputs: Vec<String>,
    pub checks: Vec<Check>,
    pub summary: serde_json::Map<String, Value>,
}

impl RunWriter {
    pub fn new(dir: PathBuf, subcommand: &str, config: &impl Serialize) -> Result<Self, CliError> {
        let config = serde_json::to_value(config).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(Self {
            dir,
            subcommand: subcommand.into(),
            config,
            started: std::time::Instant::now(),
            outputs: Vec::new(),
            checks: Vec::new(),
            summary: serde_json::Map::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_atomic(&path, table.to_csv().as_bytes())?;
        let rows = validate_csv(&path, &table.header)?;
        if rows != table.rows.len() {
            return Err(CliError::OutputValidation {
                path: path.display().to_string(),
                message: format!("read back {rows} rows, wrote {}", table.rows.len()),
            });
        }
        self.outputs.push(name.into());
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        write_atomic(&path, text.as_bytes())?;
        read_json(&path)?;
        self.outputs.push(name.into());
        Ok(())
    }

    pub fn summarize(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Writes `manifest.json` with the given status and returns its path.
    pub fn finish(self, error: Option<&CliError>) -> Result<PathBuf, CliError> {
        let status = match error {
            None if self.failed() == 0 => "ok",
            None => "checks-failed",
            Some(_) => "error",
        };
        let manifest = Manifest {
            subcommand: self.subcommand,
            version: env!("CARGO_PKG_VERSION").into(),
            config: self.config,
            status: status.into(),
            error: error.map(|e| e.to_string()),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            summary: Value::Object(self.summary),
            checks: self.checks,
            outputs: self.outputs,
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Config(e.to_string()))?;
        write_atomic(&path, text.as_bytes())?;
        read_json(&path)?;
        Ok(path)
    }
}

pub fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::OutputValidation { path: path.display().to_string(), message: e.to_string() })
}
