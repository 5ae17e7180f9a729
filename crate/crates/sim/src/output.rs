//! CSV results and the TOML metadata sidecar.
//!
//! Trace files carry one row per symbol per scenario, sweep files one row
//! per axis value per scenario. Numbers print with the shortest
//! round-trip form, so re-running with the same seed reproduces the file
//! byte for byte and a plotting script parses back the exact values.
//! Every results file gets a `<name>.meta.toml` sidecar recording the
//! resolved configurations, enough to re-run without the original
//! command line.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::ScenarioFile;

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

/// Finite values print via `Display` (shortest round-trip), NaN prints as
/// an empty field, infinities as `inf`/`-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        String::from(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        format!("{x}")
    }
}

fn fmt_count(x: Option<u64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub const SOURCE_SIMULATED: &str = "simulated";
pub const SOURCE_ANALYTICAL: &str = "analytical";

/// Row of a per-symbol trace file.
pub struct TraceRow<'a> {
    /// 1-based symbol index.
    pub symbol: usize,
    /// Scenario label, e.g. the algorithm name.
    pub algorithm: &'a str,
    pub sinr_db: f64,
    pub mse: f64,
    pub lambda: f64,
    /// Cumulative mechanism operations; `None` leaves the field empty.
    pub mult_ops: Option<u64>,
    pub add_ops: Option<u64>,
    /// `simulated` or `analytical`.
    pub source: &'a str,
}

pub struct CsvFile {
    path: String,
    writer: csv::Writer<BufWriter<File>>,
}

impl CsvFile {
    fn create(path: &Path, header: &[&str]) -> Result<Self, OutputError> {
        let display = path.display().to_string();
        let file = File::create(path).map_err(|source| OutputError::Io {
            path: display.clone(),
            source,
        })?;
        let mut writer = csv::Writer::from_writer(BufWriter::new(file));
        writer.write_record(header).map_err(|source| OutputError::Csv {
            path: display.clone(),
            source,
        })?;
        Ok(CsvFile { path: display, writer })
    }

    /// Opens a trace file and writes its header.
    pub fn traces(path: &Path) -> Result<Self, OutputError> {
        Self::create(
            path,
            &["symbol", "algorithm", "sinr_db", "mse", "lambda", "mult_ops", "add_ops", "source"],
        )
    }

    /// Opens a sweep file and writes its header.
    pub fn sweep(path: &Path) -> Result<Self, OutputError> {
        Self::create(path, &["axis_value", "statistic", "algorithm"])
    }

    fn record(&mut self, fields: &[String]) -> Result<(), OutputError> {
        self.writer.write_record(fields).map_err(|source| OutputError::Csv {
            path: self.path.clone(),
            source,
        })
    }

    pub fn trace_row(&mut self, row: &TraceRow<'_>) -> Result<(), OutputError> {
        self.record(&[
            row.symbol.to_string(),
            String::from(row.algorithm),
            fmt_f64(row.sinr_db),
            fmt_f64(row.mse),
            fmt_f64(row.lambda),
            fmt_count(row.mult_ops),
            fmt_count(row.add_ops),
            String::from(row.source),
        ])
    }

    pub fn sweep_row(
        &mut self,
        axis_value: f64,
        statistic: f64,
        algorithm: &str,
    ) -> Result<(), OutputError> {
        self.record(&[fmt_f64(axis_value), fmt_f64(statistic), String::from(algorithm)])
    }

    pub fn finish(mut self) -> Result<(), OutputError> {
        self.writer.flush().map_err(|source| OutputError::Io {
            path: self.path.clone(),
            source,
        })
    }
}

/// Per-scenario entry in the sidecar.
#[derive(Debug, Serialize)]
pub struct MetaScenario {
    pub label: String,
    pub diverged_runs: usize,
    pub config: ScenarioFile,
}

/// Provenance for one results file.
#[derive(Debug, Serialize)]
pub struct MetaSidecar {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_unix: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_path: Option<String>,
    pub seed: u64,
    pub runs: usize,
    /// SINR traces average the per-trial linear SINR, not the dB values.
    pub sinr_averaging: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_experiments: Option<usize>,
    pub scenarios: Vec<MetaScenario>,
}

impl MetaSidecar {
    pub fn new(seed: u64, runs: usize) -> Self {
        let generated_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        MetaSidecar {
            tool: "vfrls",
            version: env!("CARGO_PKG_VERSION"),
            generated_unix,
            preset: None,
            config_path: None,
            seed,
            runs,
            sinr_averaging: "linear",
            q_experiments: None,
            scenarios: Vec::new(),
        }
    }

    /// Sidecar path for a results file: `out.csv` -> `out.csv.meta.toml`.
    pub fn path_for(out: &Path) -> PathBuf {
        let mut name = out.as_os_str().to_os_string();
        name.push(".meta.toml");
        PathBuf::from(name)
    }

    pub fn write(&self, out: &Path) -> Result<(), OutputError> {
        let path = Self::path_for(out);
        let display = path.display().to_string();
        let text = toml::to_string_pretty(self).expect("sidecar serializes");
        let mut file = File::create(&path).map_err(|source| OutputError::Io {
            path: display.clone(),
            source,
        })?;
        file.write_all(text.as_bytes())
            .map_err(|source| OutputError::Io { path: display, source })
    }
}
