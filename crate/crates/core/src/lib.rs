//! Delay-Doppler radar sensing with OTFS frames.
//!
//! The chain is
//!
//! ```text
//! DD symbols --isfft--> TF grid --heisenberg--> samples --channel + AWGN-->
//!   echo --dzt--> DD echo --2D correlation--> V --peaks + refinement--> targets
//! ```
//!
//! [`modem`] implements the rectangular-pulse OTFS transforms, [`channel`] the
//! fractional delay/Doppler reflector model, [`estimator`] the correlation
//! estimator and [`ofdm`] the periodogram baseline. All operations are pure
//! and all types are `Send + Sync`.

pub mod channel;
pub mod config;
pub mod dft;
pub mod error;
pub mod estimator;
pub mod grid;
pub mod index;
pub mod modem;
pub mod ofdm;
pub mod rng;
pub mod symbols;

pub use num_complex::Complex64;

pub use channel::{ChannelSpec, NoiseSpec, Target};
pub use config::{FrameConfig, Modulation, SPEED_OF_LIGHT};
pub use error::{Error, Result};
pub use estimator::{CorrelationMap, EstimatorMode, Peak, TargetEstimate};
pub use grid::{DDGrid, TFGrid, TimeSeries};
pub use rng::RngStream;
