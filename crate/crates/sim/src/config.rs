//! TOML scenario files.
//!
//! A file mirrors `ScenarioConfig` field for field, every key optional so a
//! short file stays short; resolving fills the defaults and reports every
//! invalid field at once rather than stopping at the first. The same
//! representation serializes back out for the `validate` echo and the
//! metadata sidecar, so any resolved configuration round-trips.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use vfrls_core::filters::{CtvffParams, FfMechanism, GvffParams};
use vfrls_core::harness::{Algorithm, EntryEvent, ScenarioConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid configuration:\n{0}")]
    Invalid(ProblemList),
}

/// Field-by-field validation failures, one line each.
#[derive(Debug)]
pub struct ProblemList(pub Vec<String>);

impl fmt::Display for ProblemList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  - {p}")?;
        }
        Ok(())
    }
}

fn d_code_length() -> usize {
    15
}
fn d_path_gains() -> Vec<f64> {
    vec![0.0, -6.0, -10.0]
}
fn d_users() -> Vec<f64> {
    vec![0.0]
}
fn d_snr() -> f64 {
    15.0
}
fn d_training() -> usize {
    250
}
fn d_total() -> usize {
    1500
}
fn d_runs() -> usize {
    200
}
fn d_seed() -> u64 {
    1
}
fn d_delta1() -> f64 {
    0.934
}
fn d_delta2() -> f64 {
    0.005
}
fn d_delta3() -> f64 {
    0.99
}
fn d_ctvff_min() -> f64 {
    0.98
}
fn d_gvff_min() -> f64 {
    0.992
}
fn d_lambda_max() -> f64 {
    0.99998
}
fn d_mu() -> f64 {
    0.0025
}
fn d_lambda_init() -> f64 {
    0.998
}
fn d_fixed_lambda() -> f64 {
    0.997
}
fn d_sg_step() -> f64 {
    0.025
}

/// One interferer-entry event as written in a file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventFile {
    pub symbol: usize,
    pub offsets_db: Vec<f64>,
}

/// Receiver algorithm table, selected by `kind`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlgorithmFile {
    Ctvff {
        #[serde(default = "d_delta1")]
        delta1: f64,
        #[serde(default = "d_delta2")]
        delta2: f64,
        #[serde(default = "d_delta3")]
        delta3: f64,
        #[serde(default = "d_ctvff_min")]
        lambda_min: f64,
        #[serde(default = "d_lambda_max")]
        lambda_max: f64,
        #[serde(default)]
        posterior_error: bool,
    },
    Gvff {
        #[serde(default = "d_mu")]
        mu: f64,
        #[serde(default = "d_lambda_init")]
        lambda_init: f64,
        #[serde(default = "d_gvff_min")]
        lambda_min: f64,
        #[serde(default = "d_lambda_max")]
        lambda_max: f64,
    },
    Fixed {
        #[serde(default = "d_fixed_lambda")]
        lambda: f64,
    },
    Sg {
        #[serde(default = "d_sg_step")]
        step: f64,
    },
    Rake,
}

impl Default for AlgorithmFile {
    fn default() -> Self {
        AlgorithmFile::Ctvff {
            delta1: d_delta1(),
            delta2: d_delta2(),
            delta3: d_delta3(),
            lambda_min: d_ctvff_min(),
            lambda_max: d_lambda_max(),
            posterior_error: false,
        }
    }
}

/// On-disk form of a scenario. Scalar keys first so the TOML serializer
/// never has to emit a value after a table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default = "d_code_length")]
    pub code_length: usize,
    #[serde(default = "d_path_gains")]
    pub path_gains_db: Vec<f64>,
    #[serde(default = "d_users")]
    pub user_offsets_db: Vec<f64>,
    #[serde(default = "d_snr")]
    pub snr_db: f64,
    #[serde(default)]
    pub doppler: f64,
    #[serde(default = "d_training")]
    pub training_symbols: usize,
    #[serde(default = "d_total")]
    pub total_symbols: usize,
    #[serde(default = "d_runs")]
    pub runs: usize,
    #[serde(default = "d_seed")]
    pub seed: u64,
    #[serde(default)]
    pub events: Vec<EventFile>,
    #[serde(default)]
    pub algorithm: AlgorithmFile,
}

impl Default for ScenarioFile {
    fn default() -> Self {
        toml::from_str("").expect("empty scenario file must deserialize")
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn from_config(config: &ScenarioConfig) -> Self {
        let algorithm = match &config.algorithm {
            Algorithm::Rls(FfMechanism::Ctvff(p)) => AlgorithmFile::Ctvff {
                delta1: p.delta1,
                delta2: p.delta2,
                delta3: p.delta3,
                lambda_min: p.lambda_min,
                lambda_max: p.lambda_max,
                posterior_error: p.posterior_error,
            },
            Algorithm::Rls(FfMechanism::Gvff(p)) => AlgorithmFile::Gvff {
                mu: p.mu,
                lambda_init: p.lambda_init,
                lambda_min: p.lambda_min,
                lambda_max: p.lambda_max,
            },
            Algorithm::Rls(FfMechanism::Fixed { lambda }) => {
                AlgorithmFile::Fixed { lambda: *lambda }
            }
            Algorithm::Sg { step } => AlgorithmFile::Sg { step: *step },
            Algorithm::Rake => AlgorithmFile::Rake,
        };
        ScenarioFile {
            code_length: config.code_length,
            path_gains_db: config.path_gains_db.clone(),
            user_offsets_db: config.user_offsets_db.clone(),
            snr_db: config.snr_db,
            doppler: config.doppler,
            training_symbols: config.training_symbols,
            total_symbols: config.total_symbols,
            runs: config.runs,
            seed: config.seed,
            events: config
                .events
                .iter()
                .map(|e| EventFile { symbol: e.symbol, offsets_db: e.offsets_db.clone() })
                .collect(),
            algorithm,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario file serializes")
    }

    /// Fills defaults and checks every field, reporting all problems at
    /// once. The returned config has already passed the core validator.
    pub fn resolve(&self) -> Result<ScenarioConfig, ConfigError> {
        let mut problems = Vec::new();
        let mut push = |s: String| problems.push(s);

        if self.code_length < 2 {
            push(format!("code_length: {} is below the 2-chip minimum", self.code_length));
        }
        if self.path_gains_db.is_empty() {
            push(String::from("path_gains_db: at least one path is required"));
        } else if self.path_gains_db.iter().any(|x| !x.is_finite()) {
            push(String::from("path_gains_db: entries must be finite dB values"));
        }
        if self.user_offsets_db.is_empty() {
            push(String::from("user_offsets_db: at least the desired user is required"));
        } else if self.user_offsets_db.iter().any(|x| !x.is_finite()) {
            push(String::from("user_offsets_db: entries must be finite dB values"));
        }
        if !self.snr_db.is_finite() {
            push(format!("snr_db: {} is not finite", self.snr_db));
        }
        if !(self.doppler.is_finite() && self.doppler >= 0.0) {
            push(format!("doppler: {} is not a normalized rate >= 0", self.doppler));
        }
        if self.total_symbols == 0 {
            push(String::from("total_symbols: must be at least 1"));
        }
        if self.training_symbols > self.total_symbols {
            push(format!(
                "training_symbols: {} exceeds total_symbols {}",
                self.training_symbols, self.total_symbols
            ));
        }
        if self.runs == 0 {
            push(String::from("runs: must be at least 1"));
        }
        let mut last = 0usize;
        for ev in &self.events {
            if ev.symbol <= last {
                push(format!(
                    "events: symbols must be strictly increasing (saw {} after {})",
                    ev.symbol, last
                ));
            }
            if ev.symbol > self.total_symbols {
                push(format!(
                    "events: entry at symbol {} is beyond total_symbols {}",
                    ev.symbol, self.total_symbols
                ));
            }
            if ev.offsets_db.is_empty() {
                push(format!("events: entry at symbol {} adds no users", ev.symbol));
            } else if ev.offsets_db.iter().any(|x| !x.is_finite()) {
                push(format!("events: entry at symbol {} has non-finite offsets", ev.symbol));
            }
            last = ev.symbol;
        }

        let check_unit = |problems: &mut Vec<String>, name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                problems.push(format!("algorithm.{name}: {v} is outside (0, 1)"));
            }
        };
        let check_half_open = |problems: &mut Vec<String>, name: &str, v: f64| {
            if !(v.is_finite() && v > 0.0 && v <= 1.0) {
                problems.push(format!("algorithm.{name}: {v} is outside (0, 1]"));
            }
        };
        let check_bounds = |problems: &mut Vec<String>, lo: f64, hi: f64| {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi && hi <= 1.0) {
                problems.push(format!(
                    "algorithm.lambda_min/lambda_max: [{lo}, {hi}] is not an ordered range inside (0, 1]"
                ));
            }
        };
        let algorithm = match self.algorithm.clone() {
            AlgorithmFile::Ctvff { delta1, delta2, delta3, lambda_min, lambda_max, posterior_error } => {
                check_unit(&mut problems, "delta1", delta1);
                if !(delta2.is_finite() && delta2 > 0.0) {
                    problems.push(format!("algorithm.delta2: {delta2} must be positive and finite"));
                }
                check_unit(&mut problems, "delta3", delta3);
                check_bounds(&mut problems, lambda_min, lambda_max);
                Algorithm::Rls(FfMechanism::Ctvff(CtvffParams {
                    delta1,
                    delta2,
                    delta3,
                    lambda_min,
                    lambda_max,
                    posterior_error,
                }))
            }
            AlgorithmFile::Gvff { mu, lambda_init, lambda_min, lambda_max } => {
                if !(mu.is_finite() && mu >= 0.0) {
                    problems.push(format!("algorithm.mu: {mu} must be a finite step >= 0"));
                }
                check_half_open(&mut problems, "lambda_init", lambda_init);
                check_bounds(&mut problems, lambda_min, lambda_max);
                Algorithm::Rls(FfMechanism::Gvff(GvffParams {
                    mu,
                    lambda_init,
                    lambda_min,
                    lambda_max,
                }))
            }
            AlgorithmFile::Fixed { lambda } => {
                check_half_open(&mut problems, "lambda", lambda);
                Algorithm::Rls(FfMechanism::Fixed { lambda })
            }
            AlgorithmFile::Sg { step } => {
                if !(step.is_finite() && step >= 0.0) {
                    problems.push(format!("algorithm.step: {step} must be a finite step >= 0"));
                }
                Algorithm::Sg { step }
            }
            AlgorithmFile::Rake => Algorithm::Rake,
        };

        if !problems.is_empty() {
            return Err(ConfigError::Invalid(ProblemList(problems)));
        }

        let config = ScenarioConfig {
            code_length: self.code_length,
            path_gains_db: self.path_gains_db.clone(),
            user_offsets_db: self.user_offsets_db.clone(),
            snr_db: self.snr_db,
            doppler: self.doppler,
            algorithm,
            training_symbols: self.training_symbols,
            total_symbols: self.total_symbols,
            events: self
                .events
                .iter()
                .map(|e| EntryEvent { symbol: e.symbol, offsets_db: e.offsets_db.clone() })
                .collect(),
            runs: self.runs,
            seed: self.seed,
        };
        // Backstop for anything the field checks cannot see, like the code
        // family running out of sequences for the requested user count.
        config
            .validate()
            .map_err(|e| ConfigError::Invalid(ProblemList(vec![e.to_string()])))?;
        Ok(config)
    }
}
