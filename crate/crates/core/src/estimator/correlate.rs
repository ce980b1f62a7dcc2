//! Phase-corrected 2D correlation of the received DD grid against the
//! transmitted one (pulse compression along both axes).
//!
//! ```text
//! V[k,l] = sum_n sum_m conj(Y[n,m]) X[[n-k]_N, [m-l]_M] alpha(n-k, m-l) e^{j2pi (m-l) k / (NM)}
//! ```
//!
//! `alpha` takes the unwrapped lags: the delay lag `m - l` is negative exactly
//! when the delay index wrapped. In the exponent `k` is the signed Doppler of
//! row `k`, so a target at negative Doppler compresses to `MN |h|` as well.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{phase_offset, CorrelationMap};
use crate::channel::{self, ChannelSpec};
use crate::dft::{self, Direction};
use crate::error::{Error, Result};
use crate::grid::DDGrid;
use crate::index::signed_doppler;

fn check_shapes(y: &DDGrid, x: &DDGrid) -> Result<(usize, usize)> {
    if y.rows() != x.rows() || y.cols() != x.cols() {
        return Err(Error::DimensionMismatch {
            rows: x.rows(),
            cols: x.cols(),
            found_rows: y.rows(),
            found_cols: y.cols(),
        });
    }
    Ok((x.rows(), x.cols()))
}

/// Direct O(M^2 N^2) evaluation.
pub fn correlate2d_reference(y_dd: &DDGrid, x_dd: &DDGrid) -> Result<CorrelationMap> {
    let (n, m) = check_shapes(y_dd, x_dd)?;
    let y = y_dd.as_array();
    let x = x_dd.as_array();
    let nm = (n * m) as f64;
    let mut v = Array2::<Complex64>::zeros((n, m));
    for k in 0..n {
        let ks = signed_doppler(k as i64, n) as f64;
        // e^{j2pi d k/(NM)} for every delay lag d in (-M, M)
        let twist: Vec<Complex64> = (0..2 * m - 1)
            .map(|i| {
                let d = i as f64 - (m as f64 - 1.0);
                Complex64::from_polar(1.0, 2.0 * PI * d * ks / nm)
            })
            .collect();
        for l in 0..m {
            let mut acc = Complex64::default();
            for nn in 0..n {
                let dk = nn as i64 - k as i64;
                let xr = dk.rem_euclid(n as i64) as usize;
                let wrapped = phase_offset(dk, -1, n);
                for mm in 0..m {
                    let dl = mm as i64 - l as i64;
                    let xc = dl.rem_euclid(m as i64) as usize;
                    let alpha = if dl >= 0 { Complex64::new(1.0, 0.0) } else { wrapped };
                    let tw = twist[(dl + m as i64 - 1) as usize];
                    acc += y[(nn, mm)].conj() * x[(xr, xc)] * alpha * tw;
                }
            }
            v[(k, l)] = acc;
        }
    }
    Ok(CorrelationMap::new(v))
}

/// Same values as [`correlate2d_reference`], computed with length-`2M` FFTs.
///
/// For a fixed Doppler lag `k`, fold the twist into a modulated copy
/// `X_k[r, j] = X[r, j] e^{j2pi j k/(NM)}`. The wrapped branch of `alpha` then
/// reduces to a factor `e^{-j2pi n/N}` that depends only on the received row,
/// and each row pair `(n, [n-k]_N)` contributes a linear correlation over the
/// delay lags `-(M-1)..M-1`. The spectra of all row pairs are summed before a
/// single inverse FFT per Doppler lag: O(N^2 M log M) overall.
///
/// Rows are independent and computed in parallel; the result does not depend
/// on the thread count.
pub fn correlate2d_fast(y_dd: &DDGrid, x_dd: &DDGrid) -> Result<CorrelationMap> {
    let (n, m) = check_shapes(y_dd, x_dd)?;
    let len = 2 * m;
    let fwd = dft::plan(len, Direction::Forward);
    let y = y_dd.as_array();
    let x = x_dd.as_array();
    let nm = (n * m) as f64;

    // spectra of the zero-padded conj(Y[n, .])
    let y_spec: Vec<Vec<Complex64>> = (0..n)
        .map(|nn| {
            let mut buf = vec![Complex64::default(); len];
            for (b, z) in buf.iter_mut().zip(y.row(nn)) {
                *b = z.conj();
            }
            fwd.process(&mut buf);
            buf
        })
        .collect();
    let row_phase: Vec<Complex64> = (0..n)
        .map(|nn| Complex64::from_polar(1.0, -2.0 * PI * nn as f64 / n as f64))
        .collect();

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let fwd = dft::plan(len, Direction::Forward);
            let inv = dft::plan(len, Direction::Inverse);
            let ks = signed_doppler(k as i64, n) as f64;
            let twist: Vec<Complex64> = (0..m)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 * ks / nm))
                .collect();
            let mut acc = vec![Complex64::default(); len];
            let mut w = vec![Complex64::default(); len];
            for nn in 0..n {
                let r = (nn + n - k) % n;
                let xr = x.row(r);
                let wrap = row_phase[nn];
                // w[j] = u[-j mod 2M], u[d] = X_k[r, d] for d >= 0 and
                // e^{-j2pi n/N} X_k[r, d + M] for d < 0
                w[0] = xr[0] * twist[0];
                for j in 1..m {
                    w[j] = wrap * xr[m - j] * twist[m - j];
                }
                w[m] = Complex64::default();
                for j in m + 1..len {
                    w[j] = xr[len - j] * twist[len - j];
                }
                fwd.process(&mut w);
                for ((a, ys), ws) in acc.iter_mut().zip(&y_spec[nn]).zip(&w) {
                    *a += ys * ws;
                }
            }
            inv.process(&mut acc);
            let scale = 1.0 / len as f64;
            acc.truncate(m);
            acc.iter_mut().for_each(|z| *z *= scale);
            acc
        })
        .collect();

    let mut v = Array2::<Complex64>::zeros((n, m));
    for (k, row) in rows.into_iter().enumerate() {
        for (l, z) in row.into_iter().enumerate() {
            v[(k, l)] = z;
        }
    }
    Ok(CorrelationMap::new(v))
}

/// Correlation map averaged over i.i.d. unit-power transmit symbols, computed
/// exactly rather than by sampling.
///
/// `V` is linear in the transmitted frame and conjugate-linear in the echo, so
/// with `E[X X^H] = I` its mean is the sum over DD basis impulses `e_b` of the
/// correlation between the impulse response `G e_b` and `e_b`. Noise has zero
/// mean and does not contribute. Costs `MN` chain evaluations plus O((MN)^2).
pub fn expected_correlation(spec: &ChannelSpec) -> CorrelationMap {
    let cfg = spec.config();
    let (n, m) = (cfg.n(), cfg.m());
    let nm = (n * m) as f64;
    let responses: Vec<DDGrid> = (0..n * m)
        .map(|b| channel::impulse_response(spec, b / m, b % m))
        .collect();
    let mut v = Array2::<Complex64>::zeros((n, m));
    for k in 0..n {
        let ks = signed_doppler(k as i64, n) as f64;
        for l in 0..m {
            let mut acc = Complex64::default();
            for (b, g) in responses.iter().enumerate() {
                // only (row, col) = (b_k + k, b_l + l) pairs the echo with impulse b
                let (bk, bl) = (b / m, b % m);
                let row = (bk + k) % n;
                let col = (bl + l) % m;
                let dk = row as i64 - k as i64;
                let dl = col as i64 - l as i64;
                let alpha = phase_offset(dk, dl, n);
                let tw = Complex64::from_polar(1.0, 2.0 * PI * dl as f64 * ks / nm);
                acc += g.as_array()[(row, col)].conj() * alpha * tw;
            }
            v[(k, l)] = acc;
        }
    }
    CorrelationMap::new(v)
}
