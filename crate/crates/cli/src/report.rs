//! Deterministic artifact emission. Data payloads never contain clock
//! values; the timestamp lives in a sibling `<stem>.meta.json` file so that
//! re-running a config with the same seed yields byte-identical payloads.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::OutputFormat;
use crate::error::Result;

/// A named tabular artifact. Column names carry their units as suffixes
/// (`t_s`, `monitor_power_w`); dimensionless columns go bare.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// JSON value for a float; infinities and NaN become null rather than
/// panicking the serializer.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Write a table next to `dir` under `stem` in the requested format and
/// return the artifact file name.
pub fn write_table(dir: &Path, stem: &str, format: OutputFormat, table: &Table) -> Result<String> {
    let name = match format {
        OutputFormat::Csv => format!("{stem}.csv"),
        OutputFormat::Json => format!("{stem}.json"),
    };
    let path = dir.join(&name);
    match format {
        OutputFormat::Csv => {
            let mut text = table.columns.join(",");
            text.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                text.push_str(&cells.join(","));
                text.push('\n');
            }
            fs::write(&path, text)?;
        }
        OutputFormat::Json => {
            let objects: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    Value::Object(
                        table
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect();
            write_json(&path, &objects)?;
        }
    }
    Ok(name)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// The only artifact allowed to differ between re-runs: wall-clock metadata.
pub fn write_meta(dir: &Path, stem: &str, experiment: &str) -> Result<String> {
    let name = format!("{stem}.meta.json");
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "experiment": experiment,
        "generator": "hyperpure",
        "library_version": hyperpure::VERSION,
        "timestamp_unix_s": timestamp,
    });
    write_json(&dir.join(&name), &meta)?;
    Ok(name)
}

/// Standard report envelope: config echo, library version, notes, results.
pub fn envelope<P: Serialize>(
    experiment: &str,
    seed: u64,
    parameters: &P,
    notes: &[String],
    results: Value,
    artifacts: &[String],
) -> Value {
    json!({
        "experiment": experiment,
        "seed": seed,
        "library_version": hyperpure::VERSION,
        "parameters": serde_json::to_value(parameters).expect("serializable parameters"),
        "notes": notes,
        "results": results,
        "artifacts": artifacts,
    })
}

/// Everything one run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub report: Value,
}

impl RunSummary {
    pub fn report_path(&self) -> PathBuf {
        self.out_dir.join(format!("{}.report.json", self.experiment))
    }
}
