//! Complex signal containers for the delay-Doppler, time-frequency and time domains.

use std::marker::PhantomData;

use ndarray::Array2;
use num_complex::Complex64;

use crate::config::FrameConfig;
use crate::error::Result;

/// Marker for the delay-Doppler domain: rows are Doppler bins `k`, columns delay bins `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayDoppler;

/// Marker for the time-frequency domain: rows are time slots `n`, columns subcarriers `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeFrequency;

/// An `N x M` complex grid tagged with its signal domain.
///
/// Accessors taking signed indices wrap modulo the grid size in both axes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<D> {
    data: Array2<Complex64>,
    _domain: PhantomData<D>,
}

pub type DDGrid = Grid<DelayDoppler>;
pub type TFGrid = Grid<TimeFrequency>;

impl<D> Grid<D> {
    pub fn zeros(cfg: &FrameConfig) -> Self {
        Self::from_array(Array2::zeros((cfg.n(), cfg.m())))
    }

    pub fn from_array(data: Array2<Complex64>) -> Self {
        Self {
            data,
            _domain: PhantomData,
        }
    }

    /// Builds a grid and checks it against the frame geometry.
    pub fn for_frame(cfg: &FrameConfig, data: Array2<Complex64>) -> Result<Self> {
        cfg.check_grid(data.nrows(), data.ncols())?;
        Ok(Self::from_array(data))
    }

    pub fn from_fn(cfg: &FrameConfig, f: impl FnMut((usize, usize)) -> Complex64) -> Self {
        Self::from_array(Array2::from_shape_fn((cfg.n(), cfg.m()), f))
    }

    /// Unit impulse at `(row, col)`.
    pub fn impulse(cfg: &FrameConfig, row: usize, col: usize) -> Self {
        let mut g = Self::zeros(cfg);
        g.data[(row % cfg.n(), col % cfg.m())] = Complex64::new(1.0, 0.0);
        g
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    /// Circular read: both indices are reduced modulo the grid size.
    pub fn at(&self, row: isize, col: isize) -> Complex64 {
        let r = row.rem_euclid(self.rows() as isize) as usize;
        let c = col.rem_euclid(self.cols() as isize) as usize;
        self.data[(r, c)]
    }

    pub fn set(&mut self, row: isize, col: isize, value: Complex64) {
        let r = row.rem_euclid(self.rows() as isize) as usize;
        let c = col.rem_euclid(self.cols() as isize) as usize;
        self.data[(r, c)] = value;
    }

    pub fn as_array(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn as_array_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.data
    }

    pub fn into_array(self) -> Array2<Complex64> {
        self.data
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self::from_array(self.data.mapv(|z| z * factor))
    }

    /// Largest entrywise absolute difference to another grid of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Baseband samples of one frame at rate `M * delta_f` (`M * N` samples, no cyclic prefix).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<Complex64>,
}

impl TimeSeries {
    pub fn new(cfg: &FrameConfig, samples: Vec<Complex64>) -> Result<Self> {
        cfg.check_len(samples.len())?;
        Ok(Self { samples })
    }

    pub fn zeros(cfg: &FrameConfig) -> Self {
        Self {
            samples: vec![Complex64::new(0.0, 0.0); cfg.frame_len()],
        }
    }

    pub(crate) fn from_vec_unchecked(samples: Vec<Complex64>) -> Self {
        Self { samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(other.samples.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}
