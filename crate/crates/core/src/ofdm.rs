//! Periodogram OFDM radar, the comparison baseline.
//!
//! QPSK symbols sit directly on the time-frequency grid; every slot is sent as
//! an `M`-point inverse DFT with a cyclic prefix. The receiver strips the
//! prefixes, divides the demodulated grid by the transmitted symbols and takes
//! a 2D DFT of the quotient. Only integer periodogram bins are read out.
//!
//! With a cyclic prefix each slot lasts `(M + cp) T / M`, so one periodogram
//! Doppler bin spans `M / (M + cp)` OTFS Doppler bins.

use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::channel::{apply_targets, ChannelSpec};
use crate::config::FrameConfig;
use crate::dft::{self, Direction};
use crate::error::{Error, Result};
use crate::estimator::{pick_peaks_in, PeakOptions, TargetEstimate};
use crate::grid::TFGrid;
use crate::index::signed_doppler;

/// Cyclic-prefixed OFDM frame: `N` blocks of `cp_len + M` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    samples: Vec<Complex64>,
    cp_len: usize,
}

impl OfdmFrame {
    /// Wraps received samples; the length must be `N (M + cp_len)`.
    pub fn from_samples(cfg: &FrameConfig, samples: Vec<Complex64>, cp_len: usize) -> Result<Self> {
        let expected = cfg.n() * (cfg.m() + cp_len);
        if samples.len() != expected {
            return Err(Error::LengthMismatch { expected, found: samples.len() });
        }
        Ok(Self { samples, cp_len })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn cp_len(&self) -> usize {
        self.cp_len
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Per-slot unitary inverse DFT with `cp_len` prefix samples copied from the block tail.
pub fn ofdm_modulate(cfg: &FrameConfig, x_tf: &TFGrid, cp_len: usize) -> Result<OfdmFrame> {
    cfg.check_grid(x_tf.rows(), x_tf.cols())?;
    let m = cfg.m();
    if cp_len > m {
        return Err(Error::InvalidConfig(format!(
            "cyclic prefix of {cp_len} samples is longer than the {m}-sample block"
        )));
    }
    let mut blocks = x_tf.as_array().clone();
    dft::transform_rows(&mut blocks, Direction::Inverse);
    let mut samples = Vec::with_capacity(cfg.n() * (m + cp_len));
    for row in blocks.rows() {
        let row: Vec<Complex64> = row.to_vec();
        samples.extend_from_slice(&row[m - cp_len..]);
        samples.extend_from_slice(&row);
    }
    Ok(OfdmFrame { samples, cp_len })
}

/// Strips the prefixes and applies a unitary DFT to each block.
pub fn ofdm_demodulate(cfg: &FrameConfig, frame: &OfdmFrame) -> Result<TFGrid> {
    let block = cfg.m() + frame.cp_len;
    let expected = cfg.n() * block;
    if frame.samples.len() != expected {
        return Err(Error::LengthMismatch { expected, found: frame.samples.len() });
    }
    let mut a = Array2::from_shape_fn((cfg.n(), cfg.m()), |(n, m)| {
        frame.samples[n * block + frame.cp_len + m]
    });
    dft::transform_rows(&mut a, Direction::Forward);
    Ok(TFGrid::from_array(a))
}

/// Passes an OFDM frame through the same circular delay-Doppler channel as the OTFS chain.
pub fn apply_channel_ofdm(frame: &OfdmFrame, spec: &ChannelSpec) -> OfdmFrame {
    OfdmFrame {
        samples: apply_targets(&frame.samples, spec.targets(), spec.config().frame_len()),
        cp_len: frame.cp_len,
    }
}

/// `|2D DFT of Y_TF / X_TF|` on a `(zero_pad N) x (zero_pad M)` grid.
///
/// Rows are Doppler bins (forward DFT over slots), columns delay bins (inverse
/// DFT over subcarriers). Sums are unnormalized, so a unit echo peaks at `MN`.
pub fn ofdm_periodogram(y_tf: &TFGrid, x_tf: &TFGrid, zero_pad: usize) -> Result<Array2<f64>> {
    let (n, m) = (x_tf.rows(), x_tf.cols());
    if y_tf.rows() != n || y_tf.cols() != m {
        return Err(Error::DimensionMismatch {
            rows: n,
            cols: m,
            found_rows: y_tf.rows(),
            found_cols: y_tf.cols(),
        });
    }
    if zero_pad == 0 {
        return Err(Error::InvalidConfig("zero-padding factor must be at least 1".into()));
    }
    let (pn, pm) = (zero_pad * n, zero_pad * m);
    let mut g = Array2::<Complex64>::zeros((pn, pm));
    for ((slot, sc), x) in x_tf.as_array().indexed_iter() {
        if x.norm() == 0.0 {
            return Err(Error::ZeroSymbol { slot, subcarrier: sc });
        }
        g[(slot, sc)] = y_tf.as_array()[(slot, sc)] / x;
    }
    unnormalized_lanes(&mut g, Axis(1), Direction::Inverse);
    unnormalized_lanes(&mut g, Axis(0), Direction::Forward);
    Ok(g.mapv(|z| z.norm()))
}

fn unnormalized_lanes(a: &mut Array2<Complex64>, axis: Axis, dir: Direction) {
    let len = a.len_of(axis);
    let fft = dft::plan(len, dir);
    let mut buf = vec![Complex64::default(); len];
    for mut lane in a.lanes_mut(axis) {
        buf.iter_mut().zip(lane.iter()).for_each(|(b, z)| *b = *z);
        fft.process(&mut buf);
        lane.iter_mut().zip(&buf).for_each(|(z, b)| *z = *b);
    }
}

/// Integer periodogram peaks converted to OTFS delay/Doppler index units.
pub fn ofdm_estimates(
    cfg: &FrameConfig,
    periodogram: &Array2<f64>,
    p: usize,
    zero_pad: usize,
    cp_len: usize,
) -> Result<Vec<TargetEstimate>> {
    let rows = periodogram.nrows();
    let doppler_scale = cfg.m() as f64 / (cfg.m() + cp_len) as f64 / zero_pad as f64;
    let delay_scale = 1.0 / zero_pad as f64;
    let peaks = pick_peaks_in(periodogram, p, PeakOptions::default())?;
    Ok(peaks
        .iter()
        .map(|pk| {
            let l_tau_hat = pk.l_int as f64 * delay_scale;
            let k_nu_hat = signed_doppler(pk.k_int as i64, rows) as f64 * doppler_scale;
            let (range_hat_m, velocity_hat_mps) =
                crate::channel::indices_to_physical(l_tau_hat, k_nu_hat, cfg);
            TargetEstimate {
                k_int: pk.k_int,
                l_int: pk.l_int,
                l_tau_hat,
                k_nu_hat,
                range_hat_m,
                velocity_hat_mps,
                peak_magnitude: pk.magnitude,
                degenerate: false,
            }
        })
        .collect())
}
