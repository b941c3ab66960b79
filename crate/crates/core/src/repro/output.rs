//! Tabular results and their CSV / JSON renderings. Numbers are written in
//! shortest round-trip form, so identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{Format, RunConfig};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
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
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    /// Column names carry their units, e.g. `tau[1/kappa]`.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name || c.split('[').next() == Some(name))?;
        Some(self.rows.iter().map(|r| r[k].as_f64().unwrap_or(f64::NAN)).collect())
    }
}

/// Main table, optional sidecar tables, and summary notes.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub main: Table,
    pub sidecars: Vec<Table>,
    pub notes: Vec<(String, String)>,
}

impl Report {
    pub fn new(main: Table) -> Self {
        Self { main, sidecars: Vec::new(), notes: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }
}

pub fn render(table: &Table, report: &Report, cfg: &RunConfig) -> String {
    match cfg.format {
        Format::Csv => render_csv(table, report, cfg),
        Format::Json => render_json(table, report, cfg),
    }
}

fn render_csv(table: &Table, report: &Report, cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# command: {}", cfg.task.name());
    let _ = writeln!(s, "# table: {}", table.name);
    let _ = writeln!(s, "# config: {}", serde_json::to_string(cfg).expect("config serializes"));
    for (k, v) in &report.notes {
        let _ = writeln!(s, "# {k}: {v}");
    }
    let _ = writeln!(s, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn render_json(table: &Table, report: &Report, cfg: &RunConfig) -> String {
    let notes: serde_json::Map<String, Value> = report.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let rows: Vec<Value> = table.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
    let doc = json!({
        "command": cfg.task.name(),
        "table": table.name,
        "config": cfg,
        "notes": notes,
        "columns": table.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json");
    s.push('\n');
    s
}

/// Path of a sidecar next to the main output: `run.csv` → `run.peaks.csv`.
pub fn sidecar_path(main: &Path, name: &str) -> PathBuf {
    let stem = main.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let file = match main.extension() {
        Some(ext) => format!("{stem}.{name}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{name}"),
    };
    main.with_file_name(file)
}

/// Writes the report to `cfg.out` (plus sidecars) or, without an output
/// path, concatenates everything on stdout. Returns the paths written.
pub fn write_report(report: &Report, cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    match &cfg.out {
        Some(path) => {
            let mut written = vec![path.clone()];
            std::fs::write(path, render(&report.main, report, cfg))?;
            for side in &report.sidecars {
                let p = sidecar_path(path, &side.name);
                std::fs::write(&p, render(side, report, cfg))?;
                written.push(p);
            }
            Ok(written)
        }
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(render(&report.main, report, cfg).as_bytes())?;
            for side in &report.sidecars {
                out.write_all(b"\n")?;
                out.write_all(render(side, report, cfg).as_bytes())?;
            }
            Ok(Vec::new())
        }
    }
}
