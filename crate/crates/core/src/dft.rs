//! Unitary DFTs.
//!
//! Both directions are scaled by `1/sqrt(L)`, so every transform in the chain
//! preserves energy and the forward/inverse pair is exact up to rounding.

use std::cell::RefCell;
use std::sync::Arc;

use ndarray::{Array2, Axis};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `e^{-j2pi fk/L}` kernel.
    Forward,
    /// `e^{+j2pi fk/L}` kernel.
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(len: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Forward => p.plan_fft_forward(len),
            Direction::Inverse => p.plan_fft_inverse(len),
        }
    })
}

/// Unitary DFT of `v`. `inverse` selects the `e^{+j...}` kernel.
pub fn dft(v: &[Complex64], inverse: bool) -> Result<Vec<Complex64>> {
    if v.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = v.to_vec();
    let dir = if inverse {
        Direction::Inverse
    } else {
        Direction::Forward
    };
    transform_in_place(&mut out, dir);
    Ok(out)
}

/// In-place unitary transform. `buf` must be nonempty.
pub(crate) fn transform_in_place(buf: &mut [Complex64], dir: Direction) {
    let len = buf.len();
    plan(len, dir).process(buf);
    let scale = 1.0 / (len as f64).sqrt();
    buf.iter_mut().for_each(|z| *z *= scale);
}

/// Unitary transform of every row (along the column index).
pub(crate) fn transform_rows(a: &mut Array2<Complex64>, dir: Direction) {
    transform_lanes(a, Axis(1), dir);
}

/// Unitary transform of every column (along the row index).
pub(crate) fn transform_cols(a: &mut Array2<Complex64>, dir: Direction) {
    transform_lanes(a, Axis(0), dir);
}

fn transform_lanes(a: &mut Array2<Complex64>, axis: Axis, dir: Direction) {
    let len = a.len_of(axis);
    let fft = plan(len, dir);
    let scale = 1.0 / (len as f64).sqrt();
    let mut scratch = vec![Complex64::default(); len];
    for mut lane in a.lanes_mut(axis) {
        scratch.iter_mut().zip(lane.iter()).for_each(|(s, z)| *s = *z);
        fft.process(&mut scratch);
        lane.iter_mut()
            .zip(scratch.iter())
            .for_each(|(z, s)| *z = s * scale);
    }
}
