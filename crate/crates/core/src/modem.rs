//! OTFS modulation and demodulation with rectangular pulses.
//!
//! Rectangular transmit and receive pulses reduce the Heisenberg and Wigner
//! transforms to critically sampled block DFTs: time slot `n` occupies samples
//! `nM .. nM+M` at rate `M * delta_f`, without a cyclic prefix. Sampling is at
//! `t = qT/M` for `q` in `0..MN`.
//!
//! Because the receive chain is SFFT after a block DFT, the whole demodulator
//! collapses to a discrete Zak transform on the time samples ([`dzt_demod`]),
//! which is the per-delay-bin slow-time DFT of the fast-time/slow-time matrix.

use ndarray::Array2;
use num_complex::Complex64;

use crate::config::FrameConfig;
use crate::dft::{self, Direction};
use crate::error::Result;
use crate::grid::{DDGrid, TFGrid, TimeSeries};

/// Inverse symplectic finite Fourier transform, delay-Doppler to time-frequency.
///
/// `X_TF[n,m] = 1/sqrt(NM) sum_k sum_l X_DD[k,l] e^{j2pi(nk/N - ml/M)}`
pub fn isfft(cfg: &FrameConfig, x_dd: &DDGrid) -> Result<TFGrid> {
    cfg.check_grid(x_dd.rows(), x_dd.cols())?;
    let mut a = x_dd.as_array().clone();
    dft::transform_cols(&mut a, Direction::Inverse);
    dft::transform_rows(&mut a, Direction::Forward);
    Ok(TFGrid::from_array(a))
}

/// Symplectic finite Fourier transform, the exact inverse of [`isfft`].
pub fn sfft(cfg: &FrameConfig, y_tf: &TFGrid) -> Result<DDGrid> {
    cfg.check_grid(y_tf.rows(), y_tf.cols())?;
    let mut a = y_tf.as_array().clone();
    dft::transform_cols(&mut a, Direction::Forward);
    dft::transform_rows(&mut a, Direction::Inverse);
    Ok(DDGrid::from_array(a))
}

/// Heisenberg transform with a rectangular pulse: block-wise unitary inverse DFT of
/// each time slot, blocks concatenated.
pub fn heisenberg_rect(cfg: &FrameConfig, x_tf: &TFGrid) -> Result<TimeSeries> {
    cfg.check_grid(x_tf.rows(), x_tf.cols())?;
    let mut a = x_tf.as_array().clone();
    dft::transform_rows(&mut a, Direction::Inverse);
    Ok(TimeSeries::from_vec_unchecked(
        a.into_iter().collect::<Vec<_>>(),
    ))
}

/// Wigner transform with a rectangular matched filter: block-wise unitary forward DFT.
pub fn wigner_rect(cfg: &FrameConfig, r: &TimeSeries) -> Result<TFGrid> {
    cfg.check_len(r.len())?;
    let mut a = Array2::from_shape_vec((cfg.n(), cfg.m()), r.samples().to_vec())
        .expect("length checked");
    dft::transform_rows(&mut a, Direction::Forward);
    Ok(TFGrid::from_array(a))
}

/// Discrete Zak transform: `Y_DD[k,l] = 1/sqrt(N) sum_n y[l + nM] e^{-j2pi nk/N}`.
pub fn dzt_demod(cfg: &FrameConfig, y_td: &TimeSeries) -> Result<DDGrid> {
    cfg.check_len(y_td.len())?;
    // Row-major (N, M) reshaping puts y[l + nM] at (n, l); a DFT down each
    // column is then the slow-time DFT for delay bin l.
    let mut a = Array2::from_shape_vec((cfg.n(), cfg.m()), y_td.samples().to_vec())
        .expect("length checked");
    dft::transform_cols(&mut a, Direction::Forward);
    Ok(DDGrid::from_array(a))
}

/// Fast-time/slow-time matrix: `M x N`, entry `(m, n) = y[m + nM]`.
pub fn fasttime_slowtime(cfg: &FrameConfig, y_td: &TimeSeries) -> Result<Array2<Complex64>> {
    cfg.check_len(y_td.len())?;
    let (m, n) = (cfg.m(), cfg.n());
    let samples = y_td.samples();
    Ok(Array2::from_shape_fn((m, n), |(i, j)| samples[i + j * m]))
}

/// Flattens a fast-time/slow-time matrix back into frame order.
pub fn flatten_fasttime(cfg: &FrameConfig, r: &Array2<Complex64>) -> Result<TimeSeries> {
    cfg.check_grid(r.ncols(), r.nrows())?;
    // column-major traversal of an M x N matrix is frame order
    Ok(TimeSeries::from_vec_unchecked(r.t().iter().copied().collect()))
}

/// Heisenberg transform after ISFFT.
pub fn modulate(cfg: &FrameConfig, x_dd: &DDGrid) -> Result<TimeSeries> {
    heisenberg_rect(cfg, &isfft(cfg, x_dd)?)
}

/// SFFT after the Wigner transform; equal to [`dzt_demod`] up to rounding.
pub fn demodulate(cfg: &FrameConfig, r: &TimeSeries) -> Result<DDGrid> {
    sfft(cfg, &wigner_rect(cfg, r)?)
}
