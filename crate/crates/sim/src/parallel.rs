//! Rayon-backed drivers for the core's Monte Carlo loops.
//!
//! Trials and covariance experiments are independent given their index, so
//! both parallelize by mapping over indices and collecting back into index
//! order before the core's ordered fold. That keeps the output identical to
//! the serial functions whatever the worker count.

use rayon::prelude::*;

use vfrls_core::analysis::{q_experiment_sum, q_from_experiment_sums, QCovariance};
use vfrls_core::harness::{
    merge_trials, run_trial_in, EnvTimeline, HarnessError, MetricsTrace, ScenarioConfig,
};
use vfrls_core::linalg::CMat;
use vfrls_core::seeds::child_seed;

/// `run_monte_carlo` with the trials spread across the thread pool.
pub fn parallel_monte_carlo(config: &ScenarioConfig) -> Result<MetricsTrace, HarnessError> {
    config.validate()?;
    let timeline = EnvTimeline::build(config)?;
    let outcomes: Vec<Result<MetricsTrace, HarnessError>> = (0..config.runs)
        .into_par_iter()
        .map(|t| run_trial_in(config, child_seed(config.seed, t as u64), &timeline))
        .collect();
    merge_trials(outcomes, config.runs)
}

/// `estimate_q_covariance` with the experiments spread across the pool.
pub fn parallel_q_covariance(
    config: &ScenarioConfig,
    n_experiments: usize,
) -> Result<QCovariance, HarnessError> {
    config.validate()?;
    if n_experiments == 0 {
        return Err(HarnessError::Invalid {
            field: "n_experiments",
            reason: String::from("must be at least 1"),
        });
    }
    let m = config.window_len();
    if !config.is_fading() {
        return Ok(QCovariance { q: CMat::zeros(m, m), n_samples: 0 });
    }
    let sums = (0..n_experiments)
        .into_par_iter()
        .map(|e| q_experiment_sum(config, e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(q_from_experiment_sums(sums, m))
}
