//! Frame geometry and RF parameters shared by every stage of the chain.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Symbol alphabet carried on the delay-Doppler grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulation {
    #[default]
    Qpsk,
}

/// OTFS frame: `m` delay bins (subcarriers) by `n` Doppler bins (time slots).
///
/// The symbol duration is always `1 / delta_f`; it is derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    m: usize,
    n: usize,
    delta_f: f64,
    f_c: f64,
    modulation: Modulation,
}

impl FrameConfig {
    pub fn new(m: usize, n: usize, delta_f: f64, f_c: f64) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidConfig(format!(
                "need M >= 2 and N >= 2, got M={m}, N={n}"
            )));
        }
        if !(delta_f.is_finite() && delta_f > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "subcarrier spacing must be positive, got {delta_f}"
            )));
        }
        if !(f_c.is_finite() && f_c > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "carrier frequency must be positive, got {f_c}"
            )));
        }
        Ok(Self {
            m,
            n,
            delta_f,
            f_c,
            modulation: Modulation::Qpsk,
        })
    }

    /// Grid-only configuration for tests and index-domain work: 39 kHz spacing, 24 GHz carrier.
    pub fn with_grid(m: usize, n: usize) -> Result<Self> {
        Self::new(m, n, 39e3, 24e9)
    }

    pub fn with_modulation(mut self, modulation: Modulation) -> Self {
        self.modulation = modulation;
        self
    }

    /// Number of delay bins (subcarriers).
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of Doppler bins (time slots).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta_f(&self) -> f64 {
        self.delta_f
    }

    pub fn carrier(&self) -> f64 {
        self.f_c
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Samples per frame, `M * N`.
    pub fn frame_len(&self) -> usize {
        self.m * self.n
    }

    /// Symbol (time slot) duration `T = 1 / delta_f`.
    pub fn symbol_duration(&self) -> f64 {
        1.0 / self.delta_f
    }

    /// Frame duration `N * T`.
    pub fn frame_duration(&self) -> f64 {
        self.n as f64 * self.symbol_duration()
    }

    /// Occupied bandwidth `M * delta_f`, which is also the sample rate.
    pub fn bandwidth(&self) -> f64 {
        self.m as f64 * self.delta_f
    }

    /// Range covered by one delay bin, `c / (2 M delta_f)`.
    pub fn range_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.bandwidth())
    }

    /// Radial velocity covered by one Doppler bin, `c / (2 f_c N T)`.
    pub fn velocity_resolution(&self) -> f64 {
        SPEED_OF_LIGHT / (2.0 * self.f_c * self.frame_duration())
    }

    pub(crate) fn check_grid(&self, rows: usize, cols: usize) -> Result<()> {
        if rows != self.n || cols != self.m {
            return Err(Error::DimensionMismatch {
                rows: self.n,
                cols: self.m,
                found_rows: rows,
                found_cols: cols,
            });
        }
        Ok(())
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.frame_len() {
            return Err(Error::LengthMismatch {
                expected: self.frame_len(),
                found: len,
            });
        }
        Ok(())
    }
}
