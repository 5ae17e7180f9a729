//! Multipath channel state with sum-of-sinusoids fading.
//!
//! Each path carries a complex gain `h_f(i) = p_f * alpha_f(i)` where the
//! `p_f` come from a unit-energy power profile and `alpha_f` is either the
//! constant 1 (time-invariant scenarios) or a Rayleigh-like oscillator sum.
//! The oscillator angles are drawn once per path with a common random
//! rotation, which makes the ensemble autocorrelation of `alpha_f` exactly
//! the zeroth-order Bessel function of the lag times `2*pi*f_dT`.
//!
//! The state tracks the gains at the previous, current, and next symbol so
//! intersymbol terms can be synthesized without re-evaluating oscillators.

use alloc::vec::Vec;
use core::f64::consts::TAU;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::C64;
use crate::seeds::STREAM_CHANNEL;

/// Oscillators per path. Eight keeps the per-path spectrum dense enough for
/// the time-averaged autocorrelation to track the Bessel curve at the
/// normalized Doppler rates of interest while staying cheap to evaluate.
pub const NUM_OSCILLATORS: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("power profile must have at least one path")]
    EmptyProfile,
    #[error("normalized Doppler must be finite and non-negative, got {0}")]
    BadDoppler(f64),
}

/// Per-path amplitudes with unit total energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile {
    amps: Vec<f64>,
}

impl PowerProfile {
    /// Builds a profile from relative path powers in dB; energies are
    /// normalized to sum to one.
    pub fn from_db(powers_db: &[f64]) -> Result<Self, ChannelError> {
        if powers_db.is_empty() {
            return Err(ChannelError::EmptyProfile);
        }
        let linear: Vec<f64> = powers_db.iter().map(|db| libm::pow(10.0, db / 10.0)).collect();
        let total: f64 = linear.iter().sum();
        Ok(PowerProfile { amps: linear.iter().map(|p| libm::sqrt(p / total)).collect() })
    }

    pub fn num_paths(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }
}

#[derive(Debug, Clone)]
struct PathOscillators {
    /// Angular increments per symbol, `2*pi*f_dT*cos(theta_n)`.
    omegas: [f64; NUM_OSCILLATORS],
    phases: [f64; NUM_OSCILLATORS],
}

impl PathOscillators {
    fn draw(doppler: f64, rng: &mut impl Rng) -> Self {
        let rotation: f64 = rng.random::<f64>() * TAU;
        let mut omegas = [0.0; NUM_OSCILLATORS];
        let mut phases = [0.0; NUM_OSCILLATORS];
        for n in 0..NUM_OSCILLATORS {
            let theta = rotation + TAU * n as f64 / NUM_OSCILLATORS as f64;
            omegas[n] = TAU * doppler * libm::cos(theta);
            phases[n] = rng.random::<f64>() * TAU;
        }
        PathOscillators { omegas, phases }
    }

    fn eval(&self, t: i64) -> C64 {
        let mut sum = C64::ZERO;
        for n in 0..NUM_OSCILLATORS {
            let arg = self.omegas[n] * t as f64 + self.phases[n];
            sum += C64::from_polar(1.0, arg);
        }
        sum / libm::sqrt(NUM_OSCILLATORS as f64)
    }
}

#[derive(Debug, Clone)]
enum Fading {
    /// Deterministic gains equal to the profile amplitudes.
    Fixed,
    /// Independent oscillator sums per path.
    Jakes(Vec<PathOscillators>),
}

/// Channel gains around the current symbol.
#[derive(Debug, Clone)]
pub struct ChannelState {
    profile: PowerProfile,
    fading: Fading,
    symbol: i64,
    h_prev: Vec<C64>,
    h: Vec<C64>,
    h_next: Vec<C64>,
}

impl ChannelState {
    /// Time-invariant channel: `h_f = p_f` for the whole run.
    pub fn time_invariant(profile: PowerProfile) -> Self {
        let h: Vec<C64> = profile.amps.iter().map(|&a| C64::new(a, 0.0)).collect();
        ChannelState {
            profile,
            fading: Fading::Fixed,
            symbol: 1,
            h_prev: h.clone(),
            h: h.clone(),
            h_next: h,
        }
    }

    /// Fading channel with one oscillator set per path, drawn from the
    /// channel stream of the given seed. `doppler` is the normalized rate
    /// `f_dT` in cycles per symbol; zero freezes the gains at their initial
    /// draw.
    pub fn fading(profile: PowerProfile, doppler: f64, seed: u64) -> Result<Self, ChannelError> {
        if !doppler.is_finite() || doppler < 0.0 {
            return Err(ChannelError::BadDoppler(doppler));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(STREAM_CHANNEL);
        let paths: Vec<PathOscillators> =
            (0..profile.num_paths()).map(|_| PathOscillators::draw(doppler, &mut rng)).collect();
        let mut state = ChannelState {
            profile,
            fading: Fading::Jakes(paths),
            symbol: 1,
            h_prev: Vec::new(),
            h: Vec::new(),
            h_next: Vec::new(),
        };
        state.h_prev = state.gains_at(0);
        state.h = state.gains_at(1);
        state.h_next = state.gains_at(2);
        Ok(state)
    }

    /// Freezes arbitrary gains, e.g. a time-averaged channel for analysis.
    pub fn frozen(profile: PowerProfile, h: Vec<C64>) -> Self {
        ChannelState {
            profile,
            fading: Fading::Fixed,
            symbol: 1,
            h_prev: h.clone(),
            h: h.clone(),
            h_next: h,
        }
    }

    /// Gains at an arbitrary symbol index.
    pub fn gains_at(&self, t: i64) -> Vec<C64> {
        match &self.fading {
            Fading::Fixed => self.h.clone(),
            Fading::Jakes(paths) => self
                .profile
                .amps
                .iter()
                .zip(paths)
                .map(|(&a, osc)| osc.eval(t) * a)
                .collect(),
        }
    }

    /// Advances the window one symbol.
    pub fn step(&mut self) {
        self.symbol += 1;
        match &self.fading {
            Fading::Fixed => {}
            Fading::Jakes(_) => {
                core::mem::swap(&mut self.h_prev, &mut self.h);
                core::mem::swap(&mut self.h, &mut self.h_next);
                self.h_next = self.gains_at(self.symbol + 1);
            }
        }
    }

    /// Mean gain vector over symbols `1..=horizon`.
    pub fn averaged_gains(&self, horizon: usize) -> Vec<C64> {
        match &self.fading {
            Fading::Fixed => self.h.clone(),
            Fading::Jakes(_) => {
                let mut acc = alloc::vec![C64::ZERO; self.num_paths()];
                for t in 1..=horizon as i64 {
                    for (a, g) in acc.iter_mut().zip(self.gains_at(t)) {
                        *a += g;
                    }
                }
                let scale = 1.0 / horizon as f64;
                acc.iter().map(|a| a * scale).collect()
            }
        }
    }

    pub fn symbol(&self) -> i64 {
        self.symbol
    }

    pub fn num_paths(&self) -> usize {
        self.profile.num_paths()
    }

    pub fn profile(&self) -> &PowerProfile {
        &self.profile
    }

    pub fn h_prev(&self) -> &[C64] {
        &self.h_prev
    }

    pub fn h(&self) -> &[C64] {
        &self.h
    }

    pub fn h_next(&self) -> &[C64] {
        &self.h_next
    }
}
