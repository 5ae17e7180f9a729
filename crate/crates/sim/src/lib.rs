//! Experiment front end for the `vfrls-core` receivers.
//!
//! The core crate owns the numerics; this one owns everything that touches
//! the outside world: TOML scenario files, the figure presets, thread-pooled
//! Monte Carlo and increment-covariance drivers, and the CSV/metadata
//! writers behind the `vfrls` binary. Parallel results are bit-identical to
//! the serial ones because per-trial seeds are deterministic and the final
//! reduction always folds in trial order.

pub mod config;
pub mod output;
mod parallel;
pub mod presets;
pub mod runner;

pub use parallel::{parallel_monte_carlo, parallel_q_covariance};
