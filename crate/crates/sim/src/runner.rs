//! Plan execution: Monte Carlo runs in, CSV rows out.
//!
//! A plan's scenarios run one after another, each internally parallel
//! over trials. Trace plans emit one row per symbol; sweep plans one row
//! per axis value; the SNR study emits simulated and predicted
//! steady-state MSE side by side. Closed-form prediction rows carry
//! `source = "analytical"` in trace files and an `-analytical` label
//! suffix in sweep files, so one file holds both curves.

use std::path::Path;

use vfrls_core::analysis::{predict_ctvff, AnalysisError};
use vfrls_core::env::linear_to_db;
use vfrls_core::filters::FfMechanism;
use vfrls_core::harness::{
    apply_axis, steady_mse, steady_sinr_db, Algorithm, EnvTimeline, HarnessError, ScenarioConfig,
    SweepStatistic,
};

use crate::config::ScenarioFile;
use crate::output::{
    CsvFile, MetaScenario, MetaSidecar, OutputError, TraceRow, SOURCE_ANALYTICAL, SOURCE_SIMULATED,
};
use crate::presets::{PlanKind, RunPlan};
use crate::{parallel_monte_carlo, parallel_q_covariance};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Output(#[from] OutputError),
    #[error("{0}")]
    Harness(#[from] HarnessError),
    #[error("prediction: {0}")]
    Analysis(#[from] AnalysisError),
    #[error("analytical lines require a CTVFF scenario, got `{label}`")]
    AnalyticalNeedsCtvff { label: String },
}

/// Constant line the closed-form predictors contribute to a file.
struct PredictedLine {
    lambda_inf: f64,
    mse: f64,
    used_q: bool,
}

/// Steady-state prediction for a CTVFF scenario: the static expression on
/// a time-invariant channel, the tracking expression with an estimated
/// weight-increment covariance on a fading one. The environment is taken
/// at the first symbol of the shared channel realization.
fn predict_line(
    config: &ScenarioConfig,
    label: &str,
    q_experiments: usize,
) -> Result<PredictedLine, RunError> {
    let Algorithm::Rls(FfMechanism::Ctvff(p)) = &config.algorithm else {
        return Err(RunError::AnalyticalNeedsCtvff { label: String::from(label) });
    };
    let timeline = EnvTimeline::build(config)?;
    let env = timeline.env_at(1);
    let q = if config.is_fading() {
        Some(parallel_q_covariance(config, q_experiments)?)
    } else {
        None
    };
    let pred = predict_ctvff(p.delta1, p.delta2, p.delta3, env, q.as_ref())?;
    Ok(PredictedLine {
        lambda_inf: pred.lambda_inf,
        mse: pred.tracking_mse.unwrap_or(pred.ss_mse),
        used_q: q.is_some(),
    })
}

fn meta_entry(label: &str, config: &ScenarioConfig, diverged_runs: usize) -> MetaScenario {
    MetaScenario {
        label: String::from(label),
        diverged_runs,
        config: ScenarioFile::from_config(config),
    }
}

/// Runs every scenario of the plan and writes the results file. The
/// returned sidecar has the scenario list filled in; the caller adds the
/// invocation fields and writes it next to the results.
pub fn execute(plan: &RunPlan, out: &Path, q_experiments: usize) -> Result<MetaSidecar, RunError> {
    assert!(!plan.scenarios.is_empty(), "plan has no scenarios");
    let first = &plan.scenarios[0].config;
    let mut meta = MetaSidecar::new(first.seed, first.runs);
    let mut used_q = false;

    match &plan.kind {
        PlanKind::Traces { analytical } => {
            let mut file = CsvFile::traces(out)?;
            for sc in &plan.scenarios {
                eprintln!("{}: {} ({} runs)", plan.name, sc.label, sc.config.runs);
                let trace = parallel_monte_carlo(&sc.config)?;
                for i in 0..trace.mse.len() {
                    file.trace_row(&TraceRow {
                        symbol: i + 1,
                        algorithm: &sc.label,
                        sinr_db: trace.sinr_db[i],
                        mse: trace.mse[i],
                        lambda: trace.lambda[i],
                        mult_ops: Some(trace.mult_ops[i]),
                        add_ops: Some(trace.add_ops[i]),
                        source: SOURCE_SIMULATED,
                    })?;
                }
                if *analytical {
                    let line = predict_line(&sc.config, &sc.label, q_experiments)?;
                    used_q |= line.used_q;
                    for symbol in 1..=sc.config.total_symbols {
                        file.trace_row(&TraceRow {
                            symbol,
                            algorithm: &sc.label,
                            sinr_db: f64::NAN,
                            mse: line.mse,
                            lambda: line.lambda_inf,
                            mult_ops: None,
                            add_ops: None,
                            source: SOURCE_ANALYTICAL,
                        })?;
                    }
                }
                meta.scenarios.push(meta_entry(&sc.label, &sc.config, trace.diverged_runs));
            }
            file.finish()?;
        }
        PlanKind::Sweep { axis, values, statistic } => {
            let mut file = CsvFile::sweep(out)?;
            for sc in &plan.scenarios {
                let mut diverged = 0;
                for &value in values {
                    let mut config = sc.config.clone();
                    apply_axis(&mut config, *axis, value)?;
                    let trace = parallel_monte_carlo(&config)?;
                    let stat = match statistic {
                        SweepStatistic::SteadySinrDb => steady_sinr_db(&trace),
                        SweepStatistic::Ber => {
                            trace.ber.ok_or(HarnessError::NoDecisionDirected)?
                        }
                    };
                    eprintln!(
                        "{}: {} {}={} -> {}",
                        plan.name,
                        sc.label,
                        axis.name(),
                        value,
                        stat
                    );
                    file.sweep_row(value, stat, &sc.label)?;
                    diverged += trace.diverged_runs;
                }
                meta.scenarios.push(meta_entry(&sc.label, &sc.config, diverged));
            }
            file.finish()?;
        }
        PlanKind::SnrAnalysis { snrs } => {
            let mut file = CsvFile::sweep(out)?;
            for sc in &plan.scenarios {
                let mut diverged = 0;
                for &snr in snrs {
                    let mut config = sc.config.clone();
                    config.snr_db = snr;
                    let trace = parallel_monte_carlo(&config)?;
                    let simulated_db = linear_to_db(steady_mse(&trace));
                    let line = predict_line(&config, &sc.label, q_experiments)?;
                    used_q |= line.used_q;
                    let predicted_db = linear_to_db(line.mse);
                    eprintln!(
                        "{}: {} SNR={} -> simulated {} dB, predicted {} dB",
                        plan.name, sc.label, snr, simulated_db, predicted_db
                    );
                    file.sweep_row(snr, simulated_db, &sc.label)?;
                    file.sweep_row(snr, predicted_db, &format!("{}-analytical", sc.label))?;
                    diverged += trace.diverged_runs;
                }
                meta.scenarios.push(meta_entry(&sc.label, &sc.config, diverged));
            }
            file.finish()?;
        }
    }

    if used_q {
        meta.q_experiments = Some(q_experiments);
    }
    Ok(meta)
}
