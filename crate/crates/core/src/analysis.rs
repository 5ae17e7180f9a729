//! Closed-form steady-state and tracking predictors for the CTVFF
//! mechanism, plus the weight-increment covariance estimator they need
//! under fading.
//!
//! The predictors assume the recursion has settled: the error magnitude
//! correlation sits at its floor xi_min, which pins the accumulator gamma
//! and through it the forgetting factor. Excess MSE then follows the
//! classic RLS steady-state expression in (1 - lambda)/(1 + lambda), and
//! tracking adds a lag term driven by how fast the optimum filter moves,
//! summarized by the increment covariance Q. All quantities are linear;
//! convert to dB only at the reporting boundary.

use alloc::string::String;
use alloc::vec::Vec;

use crate::channel::{ChannelState, PowerProfile};
use crate::codes::gen_spreading_codes;
use crate::env::{compute_analytical_env, AnalyticalEnv};
use crate::harness::{HarnessError, ScenarioConfig};
use crate::linalg::{C64, CMat};
use crate::seeds::child_seed;
use crate::signal::{build_constraint_matrix, user_components};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("delta1 = {0} makes the steady-state accumulator divide by zero")]
    DegenerateDelta1(f64),
    #[error("lambda = {0} has no finite tracking window")]
    UnitLambda(f64),
    #[error("invalid {name}: {value}")]
    BadParam { name: &'static str, value: f64 },
}

/// Steady-state predictions for a CTVFF receiver in one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct CtvffPrediction {
    pub gamma_inf: f64,
    pub lambda_inf: f64,
    /// Steady-state MSE on a static channel (linear).
    pub ss_mse: f64,
    /// Steady-state MSE including the lag term; present when an increment
    /// covariance was supplied.
    pub tracking_mse: Option<f64>,
}

/// Covariance of the per-symbol optimum-filter increment, estimated over
/// independent channel realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct QCovariance {
    /// M x M Hermitian positive semidefinite matrix, per-symbol units.
    pub q: CMat,
    /// Increment samples behind the estimate; 0 on a static channel.
    pub n_samples: u64,
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<(), AnalysisError> {
    if !(value.is_finite() && value > 0.0 && value < 1.0) {
        return Err(AnalysisError::BadParam { name, value });
    }
    Ok(())
}

/// Steady-state accumulator and forgetting factor reached by the CTVFF
/// recursion once the error magnitude statistic settles at xi_min.
/// Returns (gamma_inf, lambda_inf).
pub fn predict_lambda_inf(
    delta1: f64,
    delta2: f64,
    delta3: f64,
    xi_min: f64,
) -> Result<(f64, f64), AnalysisError> {
    if delta1 == 1.0 {
        return Err(AnalysisError::DegenerateDelta1(delta1));
    }
    check_unit_interval("delta1", delta1)?;
    check_unit_interval("delta3", delta3)?;
    if !(delta2.is_finite() && delta2 >= 0.0) {
        return Err(AnalysisError::BadParam { name: "delta2", value: delta2 });
    }
    if !(xi_min.is_finite() && xi_min > 0.0) {
        return Err(AnalysisError::BadParam { name: "xi_min", value: xi_min });
    }
    let drive = delta2 * (1.0 - delta3) * xi_min * xi_min;
    let leak = (1.0 - delta1) * (1.0 + delta3);
    let gamma_inf = drive / leak;
    // Deliberately not written as 1/(1 + gamma_inf); the two forms agreeing
    // is itself a checked identity.
    let lambda_inf = leak / (leak + drive);
    Ok((gamma_inf, lambda_inf))
}

/// Steady-state MSE of an RLS receiver with a settled forgetting factor on
/// a static channel: the optimum floor plus the estimation-noise excess.
pub fn predict_ss_mse(lambda_inf: f64, sigma0_sq: f64, m: usize, xi_min: f64) -> f64 {
    xi_min + (1.0 - lambda_inf) / (1.0 + lambda_inf) * sigma0_sq * m as f64
}

/// Steady-state MSE under fading: the static expression plus the lag
/// excess tr(R Q) / (1 - lambda^2). A unit forgetting factor has no finite
/// memory window and cannot track.
pub fn predict_tracking_mse(
    lambda_inf: f64,
    sigma0_sq: f64,
    m: usize,
    xi_min: f64,
    r_bar: &CMat,
    q: &CMat,
) -> Result<f64, AnalysisError> {
    if lambda_inf >= 1.0 {
        return Err(AnalysisError::UnitLambda(lambda_inf));
    }
    let lag = r_bar.trace_product(q).re / (1.0 - lambda_inf * lambda_inf);
    Ok(predict_ss_mse(lambda_inf, sigma0_sq, m, xi_min) + lag)
}

/// Bundles the predictors for one environment. Supplying an increment
/// covariance adds the tracking figure.
pub fn predict_ctvff(
    delta1: f64,
    delta2: f64,
    delta3: f64,
    env: &AnalyticalEnv,
    q: Option<&QCovariance>,
) -> Result<CtvffPrediction, AnalysisError> {
    let (gamma_inf, lambda_inf) = predict_lambda_inf(delta1, delta2, delta3, env.xi_min())?;
    let ss_mse = predict_ss_mse(lambda_inf, env.sigma0_sq(), env.dim(), env.xi_min());
    let tracking_mse = q
        .map(|qc| {
            predict_tracking_mse(
                lambda_inf,
                env.sigma0_sq(),
                env.dim(),
                env.xi_min(),
                env.r_bar(),
                &qc.q,
            )
        })
        .transpose()?;
    Ok(CtvffPrediction { gamma_inf, lambda_inf, ss_mse, tracking_mse })
}

/// Increment horizon per channel realization.
const Q_HORIZON: usize = 1000;
/// Salt decorrelating estimator channels from the scenario's own channel.
const Q_SALT: u64 = 0x51ab_90c3_7d2e_f864;

/// Outer-product sum of one channel realization's increments, with its
/// sample count: the unit of parallel work behind the covariance estimate.
/// Realizations are indexed by `experiment` and drawn from a stream
/// decorrelated from the scenario's own channel; partial sums merge by
/// summation in experiment order via [`q_from_experiment_sums`].
pub fn q_experiment_sum(
    config: &ScenarioConfig,
    experiment: usize,
) -> Result<(CMat, u64), HarnessError> {
    let profile = PowerProfile::from_db(&config.path_gains_db)?;
    let amps = config.amplitudes();
    let noise_var = config.noise_var();
    let family = gen_spreading_codes(config.code_length, amps.len(), config.seed)?;
    let c_mats: Vec<CMat> = family
        .codes
        .iter()
        .map(|c| build_constraint_matrix(c, profile.num_paths()))
        .collect();

    let m = config.window_len();
    let mut sum = CMat::zeros(m, m);
    let mut n_samples = 0u64;
    let mut diff = alloc::vec![C64::ZERO; m];
    let seed = child_seed(config.seed ^ Q_SALT, experiment as u64);
    let mut channel = ChannelState::fading(profile, config.doppler, seed)?;
    let mut prev: Option<Vec<C64>> = None;
    for i in 1..=Q_HORIZON {
        let comps = user_components(&c_mats, &family.codes, &channel);
        let env = compute_analytical_env(&comps, &amps, noise_var, 0)?;
        if let Some(p) = &prev {
            for ((d, a), b) in diff.iter_mut().zip(env.w0()).zip(p) {
                *d = a - b;
            }
            sum.add_outer(1.0, &diff, &diff);
            n_samples += 1;
        }
        prev = Some(env.w0().to_vec());
        if i < Q_HORIZON {
            channel.step();
        }
    }
    Ok((sum, n_samples))
}

/// Normalizes ordered per-experiment outer-product sums into the
/// covariance estimate. The fold order over `sums` is part of the
/// reproducibility contract, so concurrent callers must collect into
/// experiment order before merging.
pub fn q_from_experiment_sums(sums: Vec<(CMat, u64)>, m: usize) -> QCovariance {
    let mut q = CMat::zeros(m, m);
    let mut n_samples = 0u64;
    for (s, n) in &sums {
        q.add_assign(s);
        n_samples += n;
    }
    q.scale(1.0 / n_samples as f64);
    q.hermitize();
    QCovariance { q, n_samples }
}

/// Estimates the optimum-filter increment covariance for a scenario by
/// averaging outer products of w0(i) - w0(i-1) over `n_experiments`
/// independent channel realizations, each `Q_HORIZON` symbols long. The
/// environment uses the scenario's full (post-event) user set. A static
/// scenario has an exactly zero increment and returns a zero matrix.
pub fn estimate_q_covariance(
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
        .map(|e| q_experiment_sum(config, e))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(q_from_experiment_sums(sums, m))
}
