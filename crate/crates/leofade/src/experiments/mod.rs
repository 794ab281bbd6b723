//! Scenario configuration and the experiment drivers behind the CLI.
//!
//! The pipeline is: a TOML scenario ([`config`]) is validated into domain
//! types, a [`scenario::Scenario`] memoizes the per-elevation turbulence
//! statistics and owns threshold calibration, the [`drivers`] produce row
//! tables for each experiment, and [`output`] serializes them as CSV plus a
//! manifest that makes every run reproducible from (config, seed).

pub mod config;
pub mod drivers;
pub mod output;
pub mod scenario;

pub use config::{BaselineMode, ScenarioConfig};
pub use scenario::{calibrate_threshold, CalibrationResult, Scenario};
