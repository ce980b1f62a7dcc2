//! Delay/Doppler estimation by 2D correlation, peak picking and
//! difference-ratio fractional refinement.
//!
//! The received DD grid is correlated against the known transmitted symbols
//! ([`correlate2d_fast`]); each target compresses into a peak of height about
//! `MN |h|`, with leakage into neighboring bins set by its fractional offsets.
//! The `P` strongest local maxima give the integer bins ([`pick_peaks`]) and
//! the ratio of each peak to its stronger neighbor along each axis gives the
//! fractional part ([`refine_fractional`]). `P` is assumed known.

mod correlate;
mod peaks;
mod refine;

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

pub use correlate::{correlate2d_fast, correlate2d_reference, expected_correlation};
pub use peaks::{local_maxima, pick_peaks, pick_peaks_in, Peak, PeakOptions};
pub use refine::{fractional_offset, refine_fractional, TargetEstimate};

use crate::config::FrameConfig;
use crate::error::Result;
use crate::grid::DDGrid;

/// Phase offset of a symbol whose delay wrapped past the frame edge:
/// `1` for `l >= 0`, `e^{-j2pi k/N}` for `l < 0`.
pub fn phase_offset(k: i64, l: i64, n: usize) -> Complex64 {
    if l >= 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)
    }
}

/// `N x M` correlation values, rows indexed by Doppler lag, columns by delay lag.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    values: Array2<Complex64>,
}

impl CorrelationMap {
    pub fn new(values: Array2<Complex64>) -> Self {
        Self { values }
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn at(&self, k: isize, l: isize) -> Complex64 {
        let r = k.rem_euclid(self.rows() as isize) as usize;
        let c = l.rem_euclid(self.cols() as isize) as usize;
        self.values[(r, c)]
    }

    pub fn magnitude(&self, k: usize, l: usize) -> f64 {
        self.values[(k, l)].norm()
    }

    pub fn magnitudes(&self) -> Array2<f64> {
        self.values.mapv(|z| z.norm())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EstimatorMode {
    #[default]
    Fractional,
    /// Report bin centers only.
    IntegerOnly,
}

/// Correlate, pick `p` peaks and refine them.
pub fn estimate_targets(
    cfg: &FrameConfig,
    y_dd: &DDGrid,
    x_dd: &DDGrid,
    p: usize,
    mode: EstimatorMode,
) -> Result<Vec<TargetEstimate>> {
    cfg.check_grid(y_dd.rows(), y_dd.cols())?;
    cfg.check_grid(x_dd.rows(), x_dd.cols())?;
    let v = correlate2d_fast(y_dd, x_dd)?;
    estimates_from_map(cfg, &v, p, mode)
}

/// Peak picking and refinement on an already computed correlation map.
pub fn estimates_from_map(
    cfg: &FrameConfig,
    v: &CorrelationMap,
    p: usize,
    mode: EstimatorMode,
) -> Result<Vec<TargetEstimate>> {
    let peaks = pick_peaks(v, p)?;
    Ok(match mode {
        EstimatorMode::Fractional => refine_fractional(v, &peaks, cfg),
        EstimatorMode::IntegerOnly => peaks.iter().map(|pk| TargetEstimate::integer(pk, cfg)).collect(),
    })
}
