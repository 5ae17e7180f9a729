//! Exact second-order statistics of the received vector.
//!
//! For independent bipolar symbols and white noise, the covariance of the
//! window is the sum of rank-one terms from every user's signature and edge
//! vectors plus the noise floor. From it follow the optimal linear receiver,
//! its minimum mean squared error, and the output SINR of any filter. These
//! are the references the adaptive receivers are measured against.

use alloc::vec::Vec;

use crate::linalg::{dot, C64, CMat, LinalgError};
use crate::signal::UserComponents;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnvError {
    #[error("covariance is not positive definite: {0}")]
    NotPositiveDefinite(#[from] LinalgError),
    #[error("minimum MSE {0} outside (0, 1]; covariance model violated")]
    BadMinimumMse(f64),
    #[error("desired user {desired} out of range for {users} users")]
    BadDesiredUser { desired: usize, users: usize },
}

/// Covariance, optimal filter, and error floors for one symbol's statistics.
#[derive(Debug, Clone)]
pub struct AnalyticalEnv {
    noise_var: f64,
    desired_amp: f64,
    /// Desired user's composite signature (code convolved with the channel).
    sig: Vec<C64>,
    r_bar: CMat,
    w0: Vec<C64>,
    xi_min: f64,
    sigma0_sq: f64,
}

/// Assembles the covariance and the optimal receiver from per-user component
/// vectors. `desired` indexes the user the receiver is matched to.
pub fn compute_analytical_env(
    components: &[UserComponents],
    amps: &[f64],
    noise_var: f64,
    desired: usize,
) -> Result<AnalyticalEnv, EnvError> {
    if desired >= components.len() {
        return Err(EnvError::BadDesiredUser { desired, users: components.len() });
    }
    let m = components[desired].sig.len();
    let mut r_bar = CMat::zeros(m, m);
    for (comp, &amp) in components.iter().zip(amps) {
        let a2 = amp * amp;
        r_bar.add_outer(a2, &comp.sig, &comp.sig);
        r_bar.add_outer(a2, &comp.pre, &comp.pre);
        r_bar.add_outer(a2, &comp.post, &comp.post);
    }
    for i in 0..m {
        r_bar[(i, i)] += noise_var;
    }
    r_bar.hermitize();

    let desired_amp = amps[desired];
    let sig = components[desired].sig.clone();
    let s: Vec<C64> = sig.iter().map(|x| x * desired_amp).collect();
    let w0 = r_bar.solve_hpd(&s)?;
    let xi_min = 1.0 - dot(&s, &w0).re;
    if !(xi_min > 0.0 && xi_min <= 1.0) {
        return Err(EnvError::BadMinimumMse(xi_min));
    }
    // Evaluated through the full quadratic form rather than the solved
    // shortcut, so the two error floors stay independent computations.
    let sigma0_sq = 1.0 - 2.0 * dot(&w0, &s).re + r_bar.quadratic_form(&w0);
    Ok(AnalyticalEnv { noise_var, desired_amp, sig, r_bar, w0, xi_min, sigma0_sq })
}

impl AnalyticalEnv {
    pub fn dim(&self) -> usize {
        self.sig.len()
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn r_bar(&self) -> &CMat {
        &self.r_bar
    }

    /// Desired user's composite signature (code convolved with the channel,
    /// before amplitude scaling).
    pub fn sig(&self) -> &[C64] {
        &self.sig
    }

    /// Optimal linear receiver for the desired user.
    pub fn w0(&self) -> &[C64] {
        &self.w0
    }

    /// Mean squared error of the optimal receiver.
    pub fn xi_min(&self) -> f64 {
        self.xi_min
    }

    /// Error-floor variance seen by the adaptation (equals `xi_min` at the
    /// optimum; kept as an independent computation).
    pub fn sigma0_sq(&self) -> f64 {
        self.sigma0_sq
    }

    /// Analytic mean squared error of an arbitrary filter.
    pub fn mse_of(&self, w: &[C64]) -> f64 {
        let s: Vec<C64> = self.sig.iter().map(|x| x * self.desired_amp).collect();
        1.0 - 2.0 * dot(w, &s).re + self.r_bar.quadratic_form(w)
    }

    /// Output SINR of a filter in linear scale: desired-symbol power over
    /// everything else the filter lets through. Returns `+inf` when the
    /// filter nulls all interference and noise contributions (degenerate)
    /// and `0` when it is orthogonal to the desired signature.
    pub fn output_sinr(&self, w: &[C64]) -> f64 {
        let a2 = self.desired_amp * self.desired_amp;
        let sig_pow = a2 * dot(w, &self.sig).norm_sqr();
        let total = self.r_bar.quadratic_form(w);
        let denom = total - sig_pow;
        if sig_pow == 0.0 {
            return 0.0;
        }
        if denom <= 0.0 {
            return f64::INFINITY;
        }
        sig_pow / denom
    }

    /// Output SINR in dB; `-inf` for a filter orthogonal to the signature.
    pub fn output_sinr_db(&self, w: &[C64]) -> f64 {
        linear_to_db(self.output_sinr(w))
    }
}

/// `10 log10(x)` with the conventional sentinels at 0 and infinity.
pub fn linear_to_db(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else if x == f64::INFINITY {
        f64::INFINITY
    } else {
        10.0 * libm::log10(x)
    }
}

/// Inverse of [`linear_to_db`].
pub fn db_to_linear(db: f64) -> f64 {
    if db == f64::NEG_INFINITY {
        0.0
    } else if db == f64::INFINITY {
        f64::INFINITY
    } else {
        libm::pow(10.0, db / 10.0)
    }
}
