//! Multi-target delay-Doppler channel.
//!
//! Each target delays the frame by a real number of samples and applies a
//! constant Doppler rotation referenced to the delayed time,
//! `r[q] = h e^{j2pi k_nu (q - l_tau)/(MN)} s[q - l_tau]`. Delays wrap around
//! the frame; fractional delays are applied as a phase ramp in the DFT domain
//! of the whole frame, which is exact for frame-periodic signals.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{FrameConfig, SPEED_OF_LIGHT};
use crate::dft::{self, Direction};
use crate::error::{Error, Result};
use crate::grid::{DDGrid, TimeSeries};
use crate::modem;
use crate::rng::RngStream;

/// One point reflector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Complex reflection coefficient.
    pub gain: Complex64,
    /// Delay in samples, `l_tau = 2R/c * M delta_f`.
    pub l_tau: f64,
    /// Signed Doppler index, `k_nu = 2 f_c V / c * N T`.
    pub k_nu: f64,
}

impl Target {
    pub fn new(gain: Complex64, l_tau: f64, k_nu: f64) -> Result<Self> {
        if !(gain.norm() > 0.0) || !gain.is_finite() {
            return Err(Error::InvalidTarget(format!("gain must be nonzero, got {gain}")));
        }
        if !l_tau.is_finite() || !k_nu.is_finite() {
            return Err(Error::InvalidTarget("indices must be finite".into()));
        }
        Ok(Self { gain, l_tau, k_nu })
    }

    /// Unit gain at the given indices.
    pub fn unit(l_tau: f64, k_nu: f64) -> Result<Self> {
        Self::new(Complex64::new(1.0, 0.0), l_tau, k_nu)
    }

    /// Nearest integer delay bin and the fractional remainder in `[-0.5, 0.5]`.
    pub fn delay_parts(&self) -> (i64, f64) {
        split_index(self.l_tau)
    }

    /// Nearest integer Doppler bin and the fractional remainder in `[-0.5, 0.5]`.
    pub fn doppler_parts(&self) -> (i64, f64) {
        split_index(self.k_nu)
    }
}

fn split_index(x: f64) -> (i64, f64) {
    let i = x.round();
    (i as i64, x - i)
}

/// Targets seen through one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    cfg: FrameConfig,
    targets: Vec<Target>,
    shared_delay: bool,
}

impl ChannelSpec {
    /// Validates ranges and rejects targets sharing an integer delay bin.
    pub fn new(cfg: FrameConfig, targets: Vec<Target>) -> Result<Self> {
        let spec = Self::build(cfg, targets)?;
        if let Some((first, second, bin)) = spec.shared_delay_pair() {
            return Err(Error::SharedDelayBin { first, second, bin });
        }
        Ok(spec)
    }

    /// Like [`ChannelSpec::new`] but accepts shared integer delay bins, raising
    /// [`ChannelSpec::has_shared_delay`]. Fractional refinement assumes distinct
    /// delays, so estimates for such scenes carry no accuracy guarantee.
    pub fn allowing_shared_delay(cfg: FrameConfig, targets: Vec<Target>) -> Result<Self> {
        let mut spec = Self::build(cfg, targets)?;
        spec.shared_delay = spec.shared_delay_pair().is_some();
        Ok(spec)
    }

    fn build(cfg: FrameConfig, targets: Vec<Target>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidTarget("a channel needs at least one target".into()));
        }
        let m = cfg.m() as f64;
        let half_n = cfg.n() as f64 / 2.0;
        for t in &targets {
            if !(t.gain.norm() > 0.0) {
                return Err(Error::InvalidTarget(format!("gain must be nonzero, got {}", t.gain)));
            }
            if !(0.0..m).contains(&t.l_tau) {
                return Err(Error::DelayOutOfFrame { l_tau: t.l_tau, m: cfg.m() });
            }
            if !(-half_n..half_n).contains(&t.k_nu) {
                return Err(doppler_ambiguity(&cfg, t.k_nu));
            }
        }
        Ok(Self { cfg, targets, shared_delay: false })
    }

    fn shared_delay_pair(&self) -> Option<(usize, usize, i64)> {
        let m = self.cfg.m() as i64;
        let bins: Vec<i64> = self
            .targets
            .iter()
            .map(|t| t.delay_parts().0.rem_euclid(m))
            .collect();
        for i in 0..bins.len() {
            for j in i + 1..bins.len() {
                if bins[i] == bins[j] {
                    return Some((i, j, bins[i]));
                }
            }
        }
        None
    }

    pub fn config(&self) -> &FrameConfig {
        &self.cfg
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn has_shared_delay(&self) -> bool {
        self.shared_delay
    }
}

/// Additive white Gaussian noise level per complex sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    sigma2: f64,
}

impl NoiseSpec {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidConfig(format!("noise variance must be >= 0, got {sigma2}")));
        }
        Ok(Self { sigma2 })
    }

    pub fn noiseless() -> Self {
        Self { sigma2: 0.0 }
    }

    /// SNR is unit symbol energy over the per-sample variance: `sigma2 = 10^(-snr/10)`.
    pub fn from_snr_db(snr_db: f64) -> Self {
        Self { sigma2: 10f64.powf(-snr_db / 10.0) }
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (1.0 / self.sigma2).log10()
    }
}

/// Delay in samples for a round-trip range.
pub fn delay_index(range_m: f64, cfg: &FrameConfig) -> f64 {
    2.0 * range_m / SPEED_OF_LIGHT * cfg.bandwidth()
}

/// Signed Doppler index for a radial velocity (positive = closing).
pub fn doppler_index(velocity_mps: f64, cfg: &FrameConfig) -> f64 {
    2.0 * cfg.carrier() * velocity_mps / SPEED_OF_LIGHT * cfg.frame_duration()
}

/// Highest unambiguous speed: half the Doppler axis.
pub fn max_unambiguous_speed(cfg: &FrameConfig) -> f64 {
    cfg.n() as f64 / 2.0 * cfg.velocity_resolution()
}

fn doppler_ambiguity(cfg: &FrameConfig, k_nu: f64) -> Error {
    Error::DopplerAmbiguity {
        k_nu,
        limit: cfg.n() as f64 / 2.0,
        max_speed_mps: max_unambiguous_speed(cfg),
    }
}

/// Range and velocity to `(l_tau, k_nu)`, rejecting values outside the frame.
pub fn physical_to_indices(range_m: f64, velocity_mps: f64, cfg: &FrameConfig) -> Result<(f64, f64)> {
    if !(range_m >= 0.0) || !range_m.is_finite() || !velocity_mps.is_finite() {
        return Err(Error::InvalidTarget(format!(
            "range must be finite and >= 0 (got {range_m} m, {velocity_mps} m/s)"
        )));
    }
    let l_tau = delay_index(range_m, cfg);
    let k_nu = doppler_index(velocity_mps, cfg);
    if k_nu.abs() >= cfg.n() as f64 / 2.0 {
        return Err(doppler_ambiguity(cfg, k_nu));
    }
    if l_tau >= cfg.m() as f64 {
        return Err(Error::DelayOutOfFrame { l_tau, m: cfg.m() });
    }
    Ok((l_tau, k_nu))
}

/// `(l_tau, k_nu)` back to `(range_m, velocity_mps)`.
pub fn indices_to_physical(l_tau: f64, k_nu: f64, cfg: &FrameConfig) -> (f64, f64) {
    (
        l_tau * cfg.range_resolution(),
        k_nu * cfg.velocity_resolution(),
    )
}

/// Noiseless echo of one frame.
pub fn apply_channel(s: &TimeSeries, spec: &ChannelSpec) -> Result<TimeSeries> {
    spec.cfg.check_len(s.len())?;
    Ok(TimeSeries::from_vec_unchecked(apply_targets(
        s.samples(),
        spec.targets(),
        spec.cfg.frame_len(),
    )))
}

/// Echo of an arbitrary-length sample stream at rate `M delta_f`.
///
/// `frame_len` is `MN`, the sample count that one Doppler bin rotates through
/// one full turn; it sets the Doppler phase slope independently of the stream
/// length (an OFDM frame with cyclic prefixes is longer than `MN`).
pub fn apply_targets(s: &[Complex64], targets: &[Target], frame_len: usize) -> Vec<Complex64> {
    let len = s.len();
    let mut out = vec![Complex64::default(); len];
    if len == 0 {
        return out;
    }
    let spectrum = {
        let mut buf = s.to_vec();
        dft::transform_in_place(&mut buf, Direction::Forward);
        buf
    };
    let mn = frame_len as f64;
    for t in targets {
        let delayed = circular_delay(s, &spectrum, t.l_tau);
        let slope = 2.0 * PI * t.k_nu / mn;
        for (q, (o, d)) in out.iter_mut().zip(&delayed).enumerate() {
            let phase = slope * (q as f64 - t.l_tau);
            *o += t.gain * Complex64::from_polar(1.0, phase) * d;
        }
    }
    out
}

/// Circular delay by `tau` samples. Integer delays rotate; fractional delays
/// multiply bin `f` (signed, `f >= ceil(L/2)` maps to `f - L`) by `e^{-j2pi f tau/L}`.
fn circular_delay(s: &[Complex64], spectrum: &[Complex64], tau: f64) -> Vec<Complex64> {
    let len = s.len();
    if tau.fract() == 0.0 {
        let shift = (tau as i64).rem_euclid(len as i64) as usize;
        let mut out = s.to_vec();
        out.rotate_right(shift);
        return out;
    }
    let upper = len.div_ceil(2);
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(f, z)| {
            let fs = if f < upper { f as f64 } else { f as f64 - len as f64 };
            z * Complex64::from_polar(1.0, -2.0 * PI * fs * tau / len as f64)
        })
        .collect();
    dft::transform_in_place(&mut buf, Direction::Inverse);
    buf
}

/// Adds circularly symmetric complex Gaussian noise of variance `sigma2` per sample.
pub fn add_awgn(r: &TimeSeries, noise: NoiseSpec, rng: RngStream) -> TimeSeries {
    let mut out = r.clone();
    add_awgn_in_place(out.samples_mut(), noise, rng);
    out
}

pub fn add_awgn_in_place(samples: &mut [Complex64], noise: NoiseSpec, rng: RngStream) {
    if noise.sigma2 == 0.0 {
        return;
    }
    let std = (noise.sigma2 / 2.0).sqrt();
    let mut rng = rng.rng();
    for z in samples.iter_mut() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        *z += Complex64::new(re * std, im * std);
    }
}

/// Delay-Doppler impulse response of the full chain: the demodulated echo of a
/// frame carrying a unit impulse at `(0, 0)`.
pub fn effective_dd_channel(spec: &ChannelSpec) -> DDGrid {
    impulse_response(spec, 0, 0)
}

/// Demodulated echo of a unit impulse at `(k, l)`.
pub fn impulse_response(spec: &ChannelSpec, k: usize, l: usize) -> DDGrid {
    let cfg = spec.config();
    let s = modem::modulate(cfg, &DDGrid::impulse(cfg, k, l)).expect("frame-shaped impulse");
    let r = apply_channel(&s, spec).expect("frame-length signal");
    modem::dzt_demod(cfg, &r).expect("frame-length signal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::random_symbol_grid;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn radar_cfg() -> FrameConfig {
        FrameConfig::new(128, 64, 39e3, 24e9).unwrap()
    }

    #[test]
    fn zero_maps_to_origin() {
        let (l, k) = physical_to_indices(0.0, 0.0, &radar_cfg()).unwrap();
        assert_eq!((l, k), (0.0, 0.0));
    }

    #[test]
    fn one_bin_resolutions() {
        let cfg = radar_cfg();
        let (l, k) = physical_to_indices(30.0, 3.81, &cfg).unwrap();
        assert!((l - 0.9984).abs() < 1e-3, "l_tau = {l}");
        assert!((k - 1.0002).abs() < 1e-3, "k_nu = {k}");
        let (r, v) = indices_to_physical(l, k, &cfg);
        assert!((r - 30.0).abs() < 1e-9 && (v - 3.81).abs() < 1e-9);
    }

    #[test]
    fn design_speed_sits_on_the_ambiguity_limit() {
        let cfg = radar_cfg();
        let v = 440.0 / 3.6;
        let k = doppler_index(v, &cfg);
        assert!((k - 32.1).abs() < 0.05, "k_nu = {k}");
        match physical_to_indices(10.0, v, &cfg) {
            Err(Error::DopplerAmbiguity { max_speed_mps, .. }) => {
                assert!((max_speed_mps * 3.6 - 438.4).abs() < 1.0)
            }
            other => panic!("expected ambiguity error, got {other:?}"),
        }
        assert!(physical_to_indices(10.0, -v, &cfg).is_err());
    }

    #[test]
    fn delay_beyond_frame_is_rejected() {
        let cfg = radar_cfg();
        let r = 130.0 * cfg.range_resolution();
        assert!(matches!(
            physical_to_indices(r, 0.0, &cfg),
            Err(Error::DelayOutOfFrame { .. })
        ));
        assert!(physical_to_indices(-1.0, 0.0, &cfg).is_err());
    }

    #[test]
    fn spec_validation() {
        let cfg = FrameConfig::with_grid(16, 16).unwrap();
        assert!(Target::new(Complex64::new(0.0, 0.0), 1.0, 1.0).is_err());
        assert!(ChannelSpec::new(cfg, vec![]).is_err());
        assert!(ChannelSpec::new(cfg, vec![Target::unit(16.0, 0.0).unwrap()]).is_err());
        assert!(ChannelSpec::new(cfg, vec![Target::unit(3.0, 8.0).unwrap()]).is_err());
        assert!(ChannelSpec::new(cfg, vec![Target::unit(3.0, -8.0).unwrap()]).is_ok());
        let dup = vec![Target::unit(3.2, 1.0).unwrap(), Target::unit(2.9, -4.0).unwrap()];
        assert!(matches!(
            ChannelSpec::new(cfg, dup.clone()),
            Err(Error::SharedDelayBin { bin: 3, .. })
        ));
        let spec = ChannelSpec::allowing_shared_delay(cfg, dup).unwrap();
        assert!(spec.has_shared_delay());
    }

    #[test]
    fn identity_channel() {
        let cfg = FrameConfig::with_grid(8, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = modem::modulate(&cfg, &random_symbol_grid(&cfg, &mut rng)).unwrap();
        let spec = ChannelSpec::new(cfg, vec![Target::unit(0.0, 0.0).unwrap()]).unwrap();
        assert_eq!(apply_channel(&s, &spec).unwrap(), s);
    }

    #[test]
    fn superposition_and_energy() {
        let cfg = FrameConfig::with_grid(16, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = modem::modulate(&cfg, &random_symbol_grid(&cfg, &mut rng)).unwrap();
        let a = Target::new(Complex64::from_polar(0.7, 1.1), 3.4, -1.3).unwrap();
        let b = Target::new(Complex64::from_polar(1.2, -0.4), 9.0, 2.45).unwrap();
        let both = apply_channel(&s, &ChannelSpec::new(cfg, vec![a, b]).unwrap()).unwrap();
        let ra = apply_channel(&s, &ChannelSpec::new(cfg, vec![a]).unwrap()).unwrap();
        let rb = apply_channel(&s, &ChannelSpec::new(cfg, vec![b]).unwrap()).unwrap();
        let err = both
            .samples()
            .iter()
            .zip(ra.samples().iter().zip(rb.samples()))
            .map(|(x, (y, z))| (x - y - z).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
        let rel = (ra.energy() - 0.49 * s.energy()).abs() / s.energy();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn noise_free_awgn_is_identity() {
        let cfg = FrameConfig::with_grid(8, 4).unwrap();
        let r = TimeSeries::zeros(&cfg);
        assert_eq!(add_awgn(&r, NoiseSpec::noiseless(), RngStream::new(1, 1)), r);
        assert!(NoiseSpec::new(-1.0).is_err());
    }

    #[test]
    fn awgn_sample_variance() {
        // 10^6 samples: the relative std of the variance estimate is 1e-3
        let cfg = FrameConfig::with_grid(1000, 1000).unwrap();
        let noise = NoiseSpec::new(0.37).unwrap();
        let r = add_awgn(&TimeSeries::zeros(&cfg), noise, RngStream::new(5, 0));
        let var = r.energy() / r.len() as f64;
        assert!((var / 0.37 - 1.0).abs() < 0.01, "{var}");
        let re_var: f64 = r.samples().iter().map(|z| z.re * z.re).sum::<f64>() / r.len() as f64;
        assert!((re_var / 0.185 - 1.0).abs() < 0.01);
    }

    #[test]
    fn demodulated_noise_keeps_its_variance() {
        let cfg = FrameConfig::with_grid(512, 256).unwrap();
        let noise = NoiseSpec::from_snr_db(3.0);
        let r = add_awgn(&TimeSeries::zeros(&cfg), noise, RngStream::new(6, 0));
        let y = modem::dzt_demod(&cfg, &r).unwrap();
        let var_t = r.energy() / r.len() as f64;
        let var_dd = y.energy() / cfg.frame_len() as f64;
        assert!((var_dd / var_t - 1.0).abs() < 0.02);
        assert!((var_dd / noise.sigma2() - 1.0).abs() < 0.02);
    }

    #[test]
    fn snr_round_trip() {
        let n = NoiseSpec::from_snr_db(-7.5);
        assert!((n.snr_db() + 7.5).abs() < 1e-12);
    }

    #[test]
    fn integer_target_response_is_a_single_tap() {
        let cfg = FrameConfig::with_grid(16, 16).unwrap();
        let spec = ChannelSpec::new(cfg, vec![Target::unit(5.0, -3.0).unwrap()]).unwrap();
        let h = effective_dd_channel(&spec);
        for k in 0..16isize {
            for l in 0..16isize {
                let expect = if k == 13 && l == 5 { 1.0 } else { 0.0 };
                assert!((h.at(k, l).norm() - expect).abs() < 1e-12, "({k},{l})");
            }
        }
    }

    #[test]
    fn half_bin_doppler_splits_symmetrically() {
        let cfg = FrameConfig::with_grid(16, 16).unwrap();
        let spec = ChannelSpec::new(cfg, vec![Target::unit(4.0, 2.5).unwrap()]).unwrap();
        let h = effective_dd_channel(&spec);
        let mut col: Vec<f64> = (0..16).map(|k| h.at(k, 4).norm()).collect();
        col.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((col[0] - col[1]).abs() < 1e-9);
        assert!(col[1] > 1.5 * col[2]);
        assert!((h.at(2, 4).norm() - h.at(3, 4).norm()).abs() < 1e-9);
    }
}
