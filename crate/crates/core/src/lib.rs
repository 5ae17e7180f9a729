//! Adaptive linear receivers for DS-CDMA downlinks with variable forgetting
//! factors.
//!
//! The crate models a chip-synchronous downlink with multipath fading,
//! implements recursive least squares receivers whose forgetting factor is
//! driven by several adaptation mechanisms (fixed, gradient-based, and a
//! time-averaged error-correlation rule), and provides closed-form
//! steady-state predictions that the Monte Carlo harness can be checked
//! against.
//!
//! The crate is `no_std` (with `alloc`) so the numeric core stays free of
//! platform dependencies; file formats, parallel drivers, and the command
//! line live in the companion `vfrls-sim` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod channel;
pub mod codes;
pub mod env;
pub mod filters;
pub mod harness;
pub mod linalg;
pub mod seeds;
pub mod signal;

pub use linalg::C64;
