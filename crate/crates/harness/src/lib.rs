//! Scenario files, Monte Carlo RMSE sweeps and matrix dumps on top of
//! [`ddsense`].

pub mod associate;
pub mod config;
pub mod dump;
pub mod error;
pub mod selftest;
pub mod sweep;
pub mod trial;

pub use associate::associate;
pub use config::{EstimatorKind, Scenario, ScenarioConfig, TargetTruth};
pub use error::{Error, Result};
pub use sweep::{rmse_sweep, RmseReport, RmseRow};
pub use trial::{inspect_trial, run_trial, run_trial_snrs, Inspection, TargetError, TrialOutcome};
