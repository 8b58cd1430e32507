//! Results table, metadata sidecar and their atomic persistence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
}

/// What an experiment produces before persistence.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub results: Vec<Entry>,
    /// Extra files written by the experiment (checkpoints).
    pub files: Vec<PathBuf>,
}

impl Output {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn result(&mut self, name: impl Into<String>, value: f64, se: Option<f64>) {
        self.results.push(Entry { name: name.into(), value, se });
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub seed: Option<String>,
    pub alpha: Option<String>,
    pub trunc_n: Option<String>,
    pub dt: Option<String>,
    /// Every parameter the run used, defaults included.
    pub config: BTreeMap<String, String>,
    pub wall_clock_s: f64,
    pub results: Vec<Entry>,
    pub files: Vec<String>,
}

impl ExperimentRecord {
    pub fn new(experiment: &str, config: BTreeMap<String, String>, wall_clock_s: f64, results: Vec<Entry>) -> Self {
        Self {
            tool: "fphi".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            experiment: experiment.into(),
            seed: config.get("seed").cloned(),
            alpha: config.get("alpha").cloned(),
            trunc_n: config.get("trunc-n").cloned(),
            dt: config.get("dt").cloned(),
            config,
            wall_clock_s,
            results,
            files: Vec::new(),
        }
    }
}

pub fn csv_bytes(out: &Output) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&out.header).map_err(|e| CliError::Runtime(e.to_string()))?;
    for r in &out.rows {
        w.write_record(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

/// Writes via a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `<dir>/<experiment>.csv` and `<dir>/<experiment>.json`.
pub fn persist(dir: &Path, out: &Output, mut record: ExperimentRecord) -> Result<ExperimentRecord, CliError> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", record.experiment));
    let json_path = dir.join(format!("{}.json", record.experiment));
    write_atomic(&csv_path, &csv_bytes(out)?)?;
    record.files = std::iter::once(csv_path.clone())
        .chain(out.files.iter().cloned())
        .map(|p| p.display().to_string())
        .collect();
    let json = serde_json::to_vec_pretty(&record).map_err(|e| CliError::Runtime(e.to_string()))?;
    write_atomic(&json_path, &json)?;
    Ok(record)
}

/// Shortest round-trip text of a float.
pub fn fmt(x: f64) -> String {
    format!("{x}")
}
