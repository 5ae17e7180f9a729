//! Experiment driver.
//!
//! A scenario describes the system (spreading gain, users, channel, SNR),
//! one receiver algorithm, and the run layout: training symbols before the
//! switch to decision-directed operation, user entry events, run count, and
//! the master seed. Trials synthesize the received stream symbol by symbol,
//! adapt the receiver, and record SINR, MSE, the forgetting-factor trace,
//! and operation counts; Monte Carlo averaging and one-axis parameter
//! sweeps sit on top. Trials are deterministic functions of (config, trial
//! seed), so runs reproduce bit for bit and trials can execute in any
//! order as long as the final accumulation is ordered.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelError, ChannelState, PowerProfile};
use crate::codes::{gen_spreading_codes, CodeError};
use crate::env::{compute_analytical_env, db_to_linear, linear_to_db, AnalyticalEnv, EnvError};
use crate::filters::{
    detect, rake_filter, sg_step, FfMechanism, FilterError, RlsReceiver, SgState,
};
use crate::linalg::{dot, C64, CMat};
use crate::seeds::{child_seed, STREAM_NOISE, STREAM_SYMBOLS_BASE};
use crate::signal::{
    build_constraint_matrix, noise_vector, synth_received, user_components, window_len,
    SymbolWindow, UserComponents,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("codes: {0}")]
    Code(#[from] CodeError),
    #[error("channel: {0}")]
    Channel(#[from] ChannelError),
    #[error("environment: {0}")]
    Env(#[from] EnvError),
    #[error("filter: {0}")]
    Filter(#[from] FilterError),
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("all {runs} trials diverged")]
    AllTrialsDiverged { runs: usize },
    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),
    #[error("sweep axis {axis} does not apply to the configured algorithm")]
    AxisMismatch { axis: &'static str },
    #[error("BER requested but the run has no decision-directed symbols")]
    NoDecisionDirected,
}

/// Receiver algorithm run by a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    /// RLS with the given forgetting-factor mechanism.
    Rls(FfMechanism),
    /// LMS baseline with a fixed step size.
    Sg { step: f64 },
    /// Matched filter on the known channel; no adaptation.
    Rake,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Rls(mech) => mech.kind().name(),
            Algorithm::Sg { .. } => "sg",
            Algorithm::Rake => "rake",
        }
    }
}

/// New users entering at a given symbol, with powers relative to the
/// desired user.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryEvent {
    /// First symbol index (1-based) at which the users are active.
    pub symbol: usize,
    pub offsets_db: Vec<f64>,
}

/// Full description of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Spreading gain N (chips per symbol).
    pub code_length: usize,
    /// Power-delay profile in dB; its length is the number of paths.
    pub path_gains_db: Vec<f64>,
    /// Initial users' power offsets in dB relative to the desired user,
    /// which is entry 0 (conventionally 0 dB).
    pub user_offsets_db: Vec<f64>,
    pub snr_db: f64,
    /// Normalized Doppler rate in cycles per symbol; 0 for a static channel.
    pub doppler: f64,
    pub algorithm: Algorithm,
    pub training_symbols: usize,
    pub total_symbols: usize,
    pub events: Vec<EntryEvent>,
    pub runs: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn num_paths(&self) -> usize {
        self.path_gains_db.len()
    }

    /// Receive-window length M = N + L_p - 1.
    pub fn window_len(&self) -> usize {
        window_len(self.code_length, self.num_paths())
    }

    /// Users after all entry events.
    pub fn total_users(&self) -> usize {
        self.user_offsets_db.len() + self.events.iter().map(|e| e.offsets_db.len()).sum::<usize>()
    }

    /// Amplitudes of every user in activation order.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.user_offsets_db
            .iter()
            .chain(self.events.iter().flat_map(|e| e.offsets_db.iter()))
            .map(|&db| libm::sqrt(db_to_linear(db)))
            .collect()
    }

    /// Noise variance from the SNR convention: the desired user's power
    /// over sigma^2.
    pub fn noise_var(&self) -> f64 {
        let a1 = db_to_linear(self.user_offsets_db.first().copied().unwrap_or(0.0));
        a1 * db_to_linear(-self.snr_db)
    }

    pub fn is_fading(&self) -> bool {
        self.doppler > 0.0
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.runs == 0 {
            return Err(HarnessError::Invalid {
                field: "runs",
                reason: String::from("must be at least 1"),
            });
        }
        if self.total_symbols == 0 {
            return Err(HarnessError::Invalid {
                field: "total_symbols",
                reason: String::from("must be at least 1"),
            });
        }
        if self.training_symbols > self.total_symbols {
            return Err(HarnessError::Invalid {
                field: "training_symbols",
                reason: format!(
                    "{} exceeds total_symbols {}",
                    self.training_symbols, self.total_symbols
                ),
            });
        }
        if !self.snr_db.is_finite() {
            return Err(HarnessError::Invalid {
                field: "snr_db",
                reason: format!("{} is not finite", self.snr_db),
            });
        }
        if !(self.doppler.is_finite() && self.doppler >= 0.0) {
            return Err(HarnessError::Invalid {
                field: "doppler",
                reason: format!("{} is not a valid normalized rate", self.doppler),
            });
        }
        if self.user_offsets_db.is_empty() {
            return Err(HarnessError::Invalid {
                field: "user_offsets_db",
                reason: String::from("at least the desired user is required"),
            });
        }
        if self.user_offsets_db.iter().any(|x| !x.is_finite()) {
            return Err(HarnessError::Invalid {
                field: "user_offsets_db",
                reason: String::from("offsets must be finite"),
            });
        }
        if self.path_gains_db.iter().any(|x| !x.is_finite()) {
            return Err(HarnessError::Invalid {
                field: "path_gains_db",
                reason: String::from("path gains must be finite"),
            });
        }
        let mut last = 0usize;
        for ev in &self.events {
            if ev.symbol <= last {
                return Err(HarnessError::Invalid {
                    field: "events",
                    reason: format!("event symbols must be strictly increasing (saw {})", ev.symbol),
                });
            }
            if ev.symbol > self.total_symbols {
                return Err(HarnessError::Invalid {
                    field: "events",
                    reason: format!(
                        "event at symbol {} is beyond total_symbols {}",
                        ev.symbol, self.total_symbols
                    ),
                });
            }
            if ev.offsets_db.is_empty() {
                return Err(HarnessError::Invalid {
                    field: "events",
                    reason: format!("event at symbol {} adds no users", ev.symbol),
                });
            }
            if ev.offsets_db.iter().any(|x| !x.is_finite()) {
                return Err(HarnessError::Invalid {
                    field: "events",
                    reason: String::from("event offsets must be finite"),
                });
            }
            last = ev.symbol;
        }
        // The profile, the code family, and the receiver carry their own
        // constructor checks; run them against this config.
        PowerProfile::from_db(&self.path_gains_db)?;
        gen_spreading_codes(self.code_length, self.total_users(), self.seed)?;
        let m = self.window_len();
        match &self.algorithm {
            Algorithm::Rls(mech) => {
                RlsReceiver::new(m, mech)?;
            }
            Algorithm::Sg { step } => {
                SgState::new(m, *step)?;
            }
            Algorithm::Rake => {}
        }
        Ok(())
    }
}

/// Per-symbol statistics and second-order environments for one scenario,
/// shared by every trial: the channel realization is a function of the
/// master seed, so the environment timeline is common while noise and
/// symbols vary per trial.
pub struct EnvTimeline {
    m: usize,
    noise_var: f64,
    amps: Vec<f64>,
    /// Active-user count per symbol (index is symbol - 1).
    active: Vec<usize>,
    /// Environment slot per symbol: one slot per symbol under fading, one
    /// per entry epoch on a static channel.
    slot: Vec<usize>,
    envs: Vec<AnalyticalEnv>,
    comps: Vec<Vec<UserComponents>>,
}

impl EnvTimeline {
    pub fn build(config: &ScenarioConfig) -> Result<Self, HarnessError> {
        let profile = PowerProfile::from_db(&config.path_gains_db)?;
        let total = config.total_symbols;
        let amps = config.amplitudes();
        let noise_var = config.noise_var();
        let family = gen_spreading_codes(config.code_length, amps.len(), config.seed)?;
        let c_mats: Vec<CMat> = family
            .codes
            .iter()
            .map(|c| build_constraint_matrix(c, profile.num_paths()))
            .collect();

        // Activation symbol per user, in order; active count per symbol.
        let mut activation = vec![1usize; config.user_offsets_db.len()];
        for ev in &config.events {
            activation.extend(core::iter::repeat(ev.symbol).take(ev.offsets_db.len()));
        }
        let active: Vec<usize> =
            (1..=total).map(|i| activation.iter().filter(|&&a| a <= i).count()).collect();

        let mut envs = Vec::new();
        let mut comps = Vec::new();
        let mut slot = Vec::with_capacity(total);
        if config.is_fading() {
            let mut channel = ChannelState::fading(profile, config.doppler, config.seed)?;
            for i in 1..=total {
                let c = user_components(&c_mats, &family.codes, &channel);
                let k = active[i - 1];
                envs.push(compute_analytical_env(&c[..k], &amps[..k], noise_var, 0)?);
                comps.push(c);
                slot.push(i - 1);
                if i < total {
                    channel.step();
                }
            }
        } else {
            let channel = ChannelState::time_invariant(profile);
            let base = user_components(&c_mats, &family.codes, &channel);
            for i in 1..=total {
                let k = active[i - 1];
                if envs.is_empty() || active[i - 2] != k {
                    envs.push(compute_analytical_env(&base[..k], &amps[..k], noise_var, 0)?);
                    comps.push(base.clone());
                }
                slot.push(envs.len() - 1);
            }
        }
        Ok(EnvTimeline { m: config.window_len(), noise_var, amps, active, slot, envs, comps })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn total_users(&self) -> usize {
        self.amps.len()
    }

    /// Number of active users at a 1-based symbol index.
    pub fn active_at(&self, symbol: usize) -> usize {
        self.active[symbol - 1]
    }

    pub fn env_at(&self, symbol: usize) -> &AnalyticalEnv {
        &self.envs[self.slot[symbol - 1]]
    }

    /// Component vectors of every user (active or not) at a symbol.
    pub fn comps_at(&self, symbol: usize) -> &[UserComponents] {
        &self.comps[self.slot[symbol - 1]]
    }
}

/// Per-symbol metric arrays from one trial or a Monte Carlo average.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTrace {
    /// Output SINR in dB of the post-update filter against the exact
    /// per-symbol environment.
    pub sinr_db: Vec<f64>,
    /// Instantaneous squared error against the true symbol (linear).
    pub mse: Vec<f64>,
    /// Forgetting factor per symbol; NaN for algorithms without one.
    pub lambda: Vec<f64>,
    /// Cumulative mechanism operation counts.
    pub mult_ops: Vec<u64>,
    pub add_ops: Vec<u64>,
    /// Error rate over decision-directed symbols; absent without them.
    pub ber: Option<f64>,
    /// Trials excluded from the average because they diverged.
    pub diverged_runs: usize,
}

/// Output SINR in dB of a filter in the given environment.
pub fn sinr_of(w: &[C64], env: &AnalyticalEnv) -> f64 {
    env.output_sinr_db(w)
}

fn draw_symbol(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random::<f64>() < 0.5 {
        -1.0
    } else {
        1.0
    }
}

enum Runner {
    Rls(RlsReceiver),
    Sg(SgState),
    Rake,
}

/// Runs one trial: synthesizes the symbol stream, adapts the receiver
/// (training first, then decision-directed), applies entry events, and
/// records the per-symbol metrics.
pub fn run_trial(config: &ScenarioConfig, trial_seed: u64) -> Result<MetricsTrace, HarnessError> {
    config.validate()?;
    let timeline = EnvTimeline::build(config)?;
    run_trial_in(config, trial_seed, &timeline)
}

/// Like [`run_trial`], but against a prebuilt timeline so many trials of
/// the same config can share one environment computation. The timeline
/// must come from [`EnvTimeline::build`] on this same config.
pub fn run_trial_in(
    config: &ScenarioConfig,
    trial_seed: u64,
    tl: &EnvTimeline,
) -> Result<MetricsTrace, HarnessError> {
    let total = config.total_symbols;
    assert_eq!(tl.slot.len(), total);
    assert_eq!(tl.total_users(), config.total_users());
    let m = tl.m();
    assert_eq!(m, config.window_len());
    let mut runner = match &config.algorithm {
        Algorithm::Rls(mech) => Runner::Rls(RlsReceiver::new(m, mech)?),
        Algorithm::Sg { step } => Runner::Sg(SgState::new(m, *step)?),
        Algorithm::Rake => Runner::Rake,
    };

    let mut noise_rng = ChaCha8Rng::seed_from_u64(trial_seed);
    noise_rng.set_stream(STREAM_NOISE);
    // One independent bit stream per user, so a user's symbols do not
    // depend on who else is in the system or when they joined.
    let n_users = tl.total_users();
    let mut sym_rngs: Vec<ChaCha8Rng> = (0..n_users)
        .map(|k| {
            let mut r = ChaCha8Rng::seed_from_u64(trial_seed);
            r.set_stream(STREAM_SYMBOLS_BASE + k as u64);
            r
        })
        .collect();
    let mut live: Vec<bool> = vec![false; n_users];
    let mut windows = vec![SymbolWindow { prev: 0.0, cur: 0.0, next: 0.0 }; n_users];

    let mut sinr_db = Vec::with_capacity(total);
    let mut mse = Vec::with_capacity(total);
    let mut lambda = Vec::with_capacity(total);
    let mut mult_ops = Vec::with_capacity(total);
    let mut add_ops = Vec::with_capacity(total);
    let mut bit_errors = 0usize;

    for i in 1..=total {
        let active = tl.active_at(i);
        for k in 0..active {
            let win = &mut windows[k];
            if live[k] {
                win.prev = win.cur;
                win.cur = win.next;
            } else {
                // First active symbol: nothing was sent before it.
                win.prev = 0.0;
                win.cur = draw_symbol(&mut sym_rngs[k]);
                live[k] = true;
            }
            win.next = draw_symbol(&mut sym_rngs[k]);
        }
        let noise = noise_vector(&mut noise_rng, m, tl.noise_var());
        let r = synth_received(
            &tl.comps_at(i)[..active],
            &tl.amps()[..active],
            &windows[..active],
            &noise,
        );
        let b1 = windows[0].cur;
        let env = tl.env_at(i);

        let (z, lam) = match &mut runner {
            Runner::Rls(rx) => {
                let z = rx.rls().predict(&r);
                let b_ref = if i <= config.training_symbols { b1 } else { detect(z) };
                let out = rx.step(&r, b_ref)?;
                sinr_db.push(env.output_sinr_db(rx.w()));
                let (mu, ad) = rx.rls().ops();
                mult_ops.push(mu);
                add_ops.push(ad);
                (z, out.lambda)
            }
            Runner::Sg(st) => {
                let z = st.predict(&r);
                let b_ref = if i <= config.training_symbols { b1 } else { detect(z) };
                sg_step(st, &r, b_ref);
                sinr_db.push(env.output_sinr_db(st.w()));
                mult_ops.push(0);
                add_ops.push(0);
                (z, f64::NAN)
            }
            Runner::Rake => {
                let w = rake_filter(env);
                let z = dot(&w, &r);
                sinr_db.push(env.output_sinr_db(&w));
                mult_ops.push(0);
                add_ops.push(0);
                (z, f64::NAN)
            }
        };
        mse.push((C64::new(b1, 0.0) - z).norm_sqr());
        lambda.push(lam);
        if i > config.training_symbols && detect(z) != b1 {
            bit_errors += 1;
        }
    }

    let dd = total - config.training_symbols;
    let ber = if dd > 0 { Some(bit_errors as f64 / dd as f64) } else { None };
    Ok(MetricsTrace { sinr_db, mse, lambda, mult_ops, add_ops, ber, diverged_runs: 0 })
}

struct TraceAccumulator {
    sinr_lin: Vec<f64>,
    mse: Vec<f64>,
    lambda: Vec<f64>,
    mult_ops: Vec<u64>,
    add_ops: Vec<u64>,
    ber_sum: Option<f64>,
    count: usize,
}

impl TraceAccumulator {
    fn add(acc: &mut Option<Self>, trace: MetricsTrace) {
        match acc {
            None => {
                *acc = Some(TraceAccumulator {
                    sinr_lin: trace.sinr_db.iter().map(|&db| db_to_linear(db)).collect(),
                    mse: trace.mse,
                    lambda: trace.lambda,
                    mult_ops: trace.mult_ops,
                    add_ops: trace.add_ops,
                    ber_sum: trace.ber,
                    count: 1,
                });
            }
            Some(a) => {
                for (s, &db) in a.sinr_lin.iter_mut().zip(&trace.sinr_db) {
                    *s += db_to_linear(db);
                }
                for (s, &x) in a.mse.iter_mut().zip(&trace.mse) {
                    *s += x;
                }
                for (s, &x) in a.lambda.iter_mut().zip(&trace.lambda) {
                    *s += x;
                }
                if let (Some(acc_ber), Some(b)) = (&mut a.ber_sum, trace.ber) {
                    *acc_ber += b;
                }
                a.count += 1;
            }
        }
    }

    fn finish(self, diverged_runs: usize) -> MetricsTrace {
        let n = self.count as f64;
        MetricsTrace {
            sinr_db: self.sinr_lin.iter().map(|&s| linear_to_db(s / n)).collect(),
            mse: self.mse.iter().map(|&s| s / n).collect(),
            lambda: self.lambda.iter().map(|&s| s / n).collect(),
            mult_ops: self.mult_ops,
            add_ops: self.add_ops,
            ber: self.ber_sum.map(|s| s / n),
            diverged_runs,
        }
    }
}

/// Folds per-trial outcomes, in the order given, into the averaged trace.
/// Diverged trials are excluded and counted, any other error propagates,
/// and it is an error for every trial to diverge. Callers that compute
/// trials concurrently must still feed them here in trial order: the fold
/// order is part of the reproducibility contract.
pub fn merge_trials(
    outcomes: impl IntoIterator<Item = Result<MetricsTrace, HarnessError>>,
    runs: usize,
) -> Result<MetricsTrace, HarnessError> {
    let mut acc: Option<TraceAccumulator> = None;
    let mut diverged = 0usize;
    for outcome in outcomes {
        match outcome {
            Ok(trace) => TraceAccumulator::add(&mut acc, trace),
            Err(HarnessError::Filter(FilterError::Diverged { .. })) => diverged += 1,
            Err(e) => return Err(e),
        }
    }
    match acc {
        Some(a) => Ok(a.finish(diverged)),
        None => Err(HarnessError::AllTrialsDiverged { runs }),
    }
}

/// Averages `config.runs` trials driven by decorrelated child seeds of the
/// master seed. SINR is averaged in the linear domain and converted back
/// to dB. Diverged trials are excluded and counted; it is an error for
/// every trial to diverge.
pub fn run_monte_carlo(config: &ScenarioConfig) -> Result<MetricsTrace, HarnessError> {
    config.validate()?;
    let timeline = EnvTimeline::build(config)?;
    merge_trials(
        (0..config.runs).map(|t| run_trial_in(config, child_seed(config.seed, t as u64), &timeline)),
        config.runs,
    )
}

/// First index of the steady-state window: the final 20% of symbols (at
/// least one).
pub fn steady_start(len: usize) -> usize {
    len - (len / 5).max(1)
}

/// Mean SINR over the steady-state window, averaged linear then in dB.
pub fn steady_sinr_db(trace: &MetricsTrace) -> f64 {
    let tail = &trace.sinr_db[steady_start(trace.sinr_db.len())..];
    let mean = tail.iter().map(|&db| db_to_linear(db)).sum::<f64>() / tail.len() as f64;
    linear_to_db(mean)
}

/// Mean linear MSE over the steady-state window.
pub fn steady_mse(trace: &MetricsTrace) -> f64 {
    let tail = &trace.mse[steady_start(trace.mse.len())..];
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// One-parameter sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Delta1,
    Delta2,
    Delta3,
    Snr,
    Users,
    Doppler,
    Lambda,
}

impl SweepAxis {
    pub fn from_name(name: &str) -> Result<Self, HarnessError> {
        match name.to_lowercase().as_str() {
            "delta1" => Ok(Self::Delta1),
            "delta2" => Ok(Self::Delta2),
            "delta3" => Ok(Self::Delta3),
            "snr" => Ok(Self::Snr),
            "k" => Ok(Self::Users),
            "f_dt" => Ok(Self::Doppler),
            "lambda" => Ok(Self::Lambda),
            other => Err(HarnessError::UnknownAxis(String::from(other))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Delta1 => "delta1",
            Self::Delta2 => "delta2",
            Self::Delta3 => "delta3",
            Self::Snr => "SNR",
            Self::Users => "K",
            Self::Doppler => "f_dT",
            Self::Lambda => "lambda",
        }
    }
}

/// Statistic a sweep extracts from each Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStatistic {
    SteadySinrDb,
    Ber,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub axis_value: f64,
    pub statistic: f64,
}

/// Writes one axis value into a config. Delta axes require a CTVFF
/// mechanism and the lambda axis a fixed one; the rest apply to any
/// algorithm.
pub fn apply_axis(
    config: &mut ScenarioConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<(), HarnessError> {
    let mismatch = || HarnessError::AxisMismatch { axis: axis.name() };
    match axis {
        SweepAxis::Delta1 | SweepAxis::Delta2 | SweepAxis::Delta3 => {
            let Algorithm::Rls(FfMechanism::Ctvff(p)) = &mut config.algorithm else {
                return Err(mismatch());
            };
            match axis {
                SweepAxis::Delta1 => p.delta1 = value,
                SweepAxis::Delta2 => p.delta2 = value,
                _ => p.delta3 = value,
            }
        }
        SweepAxis::Lambda => {
            let Algorithm::Rls(FfMechanism::Fixed { lambda }) = &mut config.algorithm else {
                return Err(mismatch());
            };
            *lambda = value;
        }
        SweepAxis::Snr => config.snr_db = value,
        SweepAxis::Doppler => config.doppler = value,
        SweepAxis::Users => {
            let k = libm::round(value) as usize;
            if k == 0 {
                return Err(HarnessError::Invalid {
                    field: "K",
                    reason: String::from("user count must be at least 1"),
                });
            }
            config.user_offsets_db.resize(k, 0.0);
        }
    }
    Ok(())
}

/// Runs one Monte Carlo experiment per axis value on copies of the
/// template config and extracts the requested steady-state statistic.
pub fn sweep(
    template: &ScenarioConfig,
    axis: SweepAxis,
    values: &[f64],
    stat: SweepStatistic,
) -> Result<Vec<SweepPoint>, HarnessError> {
    values
        .iter()
        .map(|&v| {
            let mut config = template.clone();
            apply_axis(&mut config, axis, v)?;
            let trace = run_monte_carlo(&config)?;
            let statistic = match stat {
                SweepStatistic::SteadySinrDb => steady_sinr_db(&trace),
                SweepStatistic::Ber => trace.ber.ok_or(HarnessError::NoDecisionDirected)?,
            };
            Ok(SweepPoint { axis_value: v, statistic })
        })
        .collect()
}
