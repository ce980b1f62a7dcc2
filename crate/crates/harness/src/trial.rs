//! One Monte Carlo trial: draw a frame, pass it through the channel, add
//! noise, estimate and match against the truth.
//!
//! Every random draw comes from streams derived from `(seed, trial_idx)`:
//! symbols, gain phases and a unit-variance noise realization. The noise is
//! scaled to each SNR, so all SNR points and estimators of one trial see the
//! same data, gains and noise shape.

use std::f64::consts::TAU;

use ddsense::channel::{add_awgn_in_place, apply_channel, NoiseSpec};
use ddsense::estimator::{correlate2d_fast, estimates_from_map};
use ddsense::modem::{dzt_demod, fasttime_slowtime, modulate};
use ddsense::ofdm::{apply_channel_ofdm, ofdm_demodulate, ofdm_estimates, ofdm_modulate, ofdm_periodogram, OfdmFrame};
use ddsense::symbols::random_symbol_grid;
use ddsense::{Complex64, CorrelationMap, DDGrid, EstimatorMode, RngStream, TFGrid, TargetEstimate, TimeSeries};
use ndarray::Array2;
use rand::Rng;

use crate::associate::{associate, index_errors};
use crate::config::{EstimatorKind, Scenario};
use crate::error::Result;

const SYMBOL_STREAM: u64 = 1;
const GAIN_STREAM: u64 = 2;
const NOISE_STREAM: u64 = 3;

/// Signed error of one matched target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetError {
    pub target: usize,
    pub delay_idx: f64,
    pub doppler_idx: f64,
    pub range_m: f64,
    pub velocity_mps: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    /// Errors in truth order.
    Matched(Vec<TargetError>),
    /// The estimator failed; the reason is kept for reporting.
    Censored(String),
}

impl TrialOutcome {
    pub fn errors(&self) -> Option<&[TargetError]> {
        match self {
            TrialOutcome::Matched(e) => Some(e),
            TrialOutcome::Censored(_) => None,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, TrialOutcome::Censored(_))
    }
}

/// Everything computed for one trial at one SNR.
#[derive(Debug, Clone)]
pub struct Inspection {
    pub mode: EstimatorKind,
    pub snr_db: f64,
    pub gains: Vec<Complex64>,
    /// Demodulated echo (OTFS modes).
    pub received_dd: Option<DDGrid>,
    pub correlation: Option<CorrelationMap>,
    /// `M x N` fast-time/slow-time matrix of the received samples (OTFS modes).
    pub fasttime: Option<Array2<Complex64>>,
    pub periodogram: Option<Array2<f64>>,
    pub estimates: Vec<TargetEstimate>,
    /// `pairing[i]` indexes the estimate matched to target `i`.
    pub pairing: Vec<usize>,
    pub outcome: TrialOutcome,
}

enum Clean {
    Otfs { x: DDGrid, echo: TimeSeries, noise: Vec<Complex64> },
    Ofdm { x: TFGrid, echo: OfdmFrame, noise: Vec<Complex64> },
}

/// Noise-free part of a trial, reused across SNR points.
struct Prepared<'a> {
    scenario: &'a Scenario,
    mode: EstimatorKind,
    gains: Vec<Complex64>,
    clean: Clean,
}

fn unit_noise(len: usize, stream: RngStream) -> Vec<Complex64> {
    let mut w = vec![Complex64::default(); len];
    add_awgn_in_place(&mut w, NoiseSpec::from_snr_db(0.0), stream);
    w
}

fn noisy(clean: &[Complex64], noise: &[Complex64], snr_db: f64) -> Vec<Complex64> {
    let sigma = NoiseSpec::from_snr_db(snr_db).sigma2().sqrt();
    if sigma == 0.0 {
        return clean.to_vec();
    }
    clean.iter().zip(noise).map(|(c, w)| c + w * sigma).collect()
}

impl<'a> Prepared<'a> {
    fn new(scenario: &'a Scenario, trial_idx: u64, mode: EstimatorKind) -> Result<Self> {
        let base = RngStream::new(scenario.seed, trial_idx);
        let mut gain_rng = base.derive(GAIN_STREAM).rng();
        let gains: Vec<Complex64> = scenario
            .targets
            .iter()
            .map(|t| t.gain(gain_rng.random_range(0.0..TAU)))
            .collect();
        let spec = scenario.channel(&gains)?;
        let frame = &scenario.frame;
        let mut sym_rng = base.derive(SYMBOL_STREAM).rng();
        let noise_stream = base.derive(NOISE_STREAM);
        let clean = match mode {
            EstimatorKind::Fractional | EstimatorKind::IntegerOnly => {
                let x: DDGrid = random_symbol_grid(frame, &mut sym_rng);
                let echo = apply_channel(&modulate(frame, &x)?, &spec)?;
                let noise = unit_noise(echo.len(), noise_stream);
                Clean::Otfs { x, echo, noise }
            }
            EstimatorKind::OfdmBaseline => {
                let x: TFGrid = random_symbol_grid(frame, &mut sym_rng);
                let echo = apply_channel_ofdm(&ofdm_modulate(frame, &x, scenario.cp_len)?, &spec);
                let noise = unit_noise(echo.len(), noise_stream);
                Clean::Ofdm { x, echo, noise }
            }
        };
        Ok(Self { scenario, mode, gains, clean })
    }

    fn at(&self, snr_db: f64) -> Result<Inspection> {
        let s = self.scenario;
        let frame = &s.frame;
        let p = s.p();
        let mut out = Inspection {
            mode: self.mode,
            snr_db,
            gains: self.gains.clone(),
            received_dd: None,
            correlation: None,
            fasttime: None,
            periodogram: None,
            estimates: Vec::new(),
            pairing: Vec::new(),
            outcome: TrialOutcome::Censored(String::new()),
        };
        let estimates = match &self.clean {
            Clean::Otfs { x, echo, noise } => {
                let r = TimeSeries::new(frame, noisy(echo.samples(), noise, snr_db))?;
                let y = dzt_demod(frame, &r)?;
                let v = correlate2d_fast(&y, x)?;
                let mode = if self.mode == EstimatorKind::Fractional {
                    EstimatorMode::Fractional
                } else {
                    EstimatorMode::IntegerOnly
                };
                let est = estimates_from_map(frame, &v, p, mode);
                out.fasttime = Some(fasttime_slowtime(frame, &r)?);
                out.received_dd = Some(y);
                out.correlation = Some(v);
                est
            }
            Clean::Ofdm { x, echo, noise } => {
                let r = OfdmFrame::from_samples(frame, noisy(echo.samples(), noise, snr_db), s.cp_len)?;
                let y = ofdm_demodulate(frame, &r)?;
                let pg = ofdm_periodogram(&y, x, s.zero_pad)?;
                let est = ofdm_estimates(frame, &pg, p, s.zero_pad, s.cp_len);
                out.periodogram = Some(pg);
                est
            }
        };
        match estimates {
            Ok(est) => {
                let pairing = associate(&s.targets, &est, frame)?;
                let errors = s
                    .targets
                    .iter()
                    .zip(&pairing)
                    .enumerate()
                    .map(|(i, (t, &j))| {
                        let (dl, dk) = index_errors(t, &est[j], frame);
                        TargetError {
                            target: i,
                            delay_idx: dl,
                            doppler_idx: dk,
                            range_m: dl * frame.range_resolution(),
                            velocity_mps: dk * frame.velocity_resolution(),
                        }
                    })
                    .collect();
                out.outcome = TrialOutcome::Matched(errors);
                out.estimates = est;
                out.pairing = pairing;
            }
            Err(e) => out.outcome = TrialOutcome::Censored(e.to_string()),
        }
        Ok(out)
    }
}

/// Runs trial `trial_idx` at one SNR. Deterministic in `(scenario, trial_idx, snr_db, mode)`.
pub fn run_trial(scenario: &Scenario, trial_idx: u64, snr_db: f64, mode: EstimatorKind) -> Result<TrialOutcome> {
    Ok(Prepared::new(scenario, trial_idx, mode)?.at(snr_db)?.outcome)
}

/// Runs trial `trial_idx` at every SNR in `snrs`, sharing the noise-free echo.
/// Gives the same outcomes as calling [`run_trial`] per SNR.
pub fn run_trial_snrs(
    scenario: &Scenario,
    trial_idx: u64,
    mode: EstimatorKind,
    snrs: &[f64],
) -> Result<Vec<TrialOutcome>> {
    let prepared = Prepared::new(scenario, trial_idx, mode)?;
    snrs.iter().map(|&snr| Ok(prepared.at(snr)?.outcome)).collect()
}

/// Full intermediate products of one trial, for inspection and matrix dumps.
pub fn inspect_trial(scenario: &Scenario, trial_idx: u64, snr_db: f64, mode: EstimatorKind) -> Result<Inspection> {
    Prepared::new(scenario, trial_idx, mode)?.at(snr_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ScenarioConfig, TargetSection};

    fn scenario(targets: Vec<TargetSection>, modes: Vec<EstimatorKind>) -> Scenario {
        let text = r#"
schema_version = 1
[frame]
m = 32
n = 32
[[targets]]
l_tau = 1.0
k_nu = 1.0
[sweep]
snr_db = [10.0]
trials = 1
seed = 5
"#;
        let mut cfg = ScenarioConfig::from_toml(text).unwrap();
        cfg.targets = targets;
        cfg.sweep.modes = modes;
        cfg.validate().unwrap()
    }

    #[test]
    fn noiseless_integer_target_is_exact() {
        let s = scenario(vec![TargetSection::indices(7.0, -4.0)], vec![EstimatorKind::Fractional]);
        let e = run_trial(&s, 0, f64::INFINITY, EstimatorKind::IntegerOnly).unwrap().errors().unwrap()[0];
        assert!(e.delay_idx.abs() <= 1e-6 && e.doppler_idx.abs() <= 1e-6, "{e:?}");
        // periodogram bins are M/(M+cp) of an OTFS Doppler bin apart
        let e = run_trial(&s, 0, f64::INFINITY, EstimatorKind::OfdmBaseline).unwrap().errors().unwrap()[0];
        let half = 0.5 * 32.0 / (32.0 + s.cp_len as f64);
        assert!(e.delay_idx.abs() <= 1e-6 && e.doppler_idx.abs() <= half, "{e:?}");
        assert_eq!((-4.0 + e.doppler_idx).round(), -4.0);
        // The ratio reads data sidelobes of rms sqrt(MN) next to a peak of MN,
        // so a single random frame leaves a fraction of order 1/sqrt(MN).
        for trial in 0..20 {
            let e = run_trial(&s, trial, f64::INFINITY, EstimatorKind::Fractional).unwrap().errors().unwrap()[0];
            assert!(e.delay_idx.abs() <= 4.0 / 32.0 && e.doppler_idx.abs() <= 4.0 / 32.0, "{e:?}");
        }
    }

    #[test]
    fn integer_mode_quantizes_half_bin() {
        let s = scenario(vec![TargetSection::indices(7.5, 2.0)], vec![EstimatorKind::IntegerOnly]);
        let e = run_trial(&s, 0, f64::INFINITY, EstimatorKind::IntegerOnly).unwrap().errors().unwrap()[0];
        assert!((e.range_m.abs() - 0.5 * s.frame.range_resolution()).abs() < 1e-9);
        assert_eq!(e.velocity_mps, 0.0);
    }

    #[test]
    fn trials_are_reproducible_and_distinct() {
        let s = scenario(
            vec![TargetSection::indices(3.3, 2.2), TargetSection::indices(20.6, -5.7)],
            vec![EstimatorKind::Fractional],
        );
        let a = run_trial(&s, 4, 5.0, EstimatorKind::Fractional).unwrap();
        let b = run_trial(&s, 4, 5.0, EstimatorKind::Fractional).unwrap();
        assert_eq!(a, b);
        let c = run_trial(&s, 5, 5.0, EstimatorKind::Fractional).unwrap();
        assert_ne!(a, c);
        let all = run_trial_snrs(&s, 4, EstimatorKind::Fractional, &[0.0, 5.0]).unwrap();
        assert_eq!(all[1], a);
    }

    #[test]
    fn inspection_carries_matrices() {
        let s = scenario(vec![TargetSection::indices(3.0, 2.0)], vec![EstimatorKind::Fractional]);
        let i = inspect_trial(&s, 0, 20.0, EstimatorKind::Fractional).unwrap();
        assert_eq!(i.received_dd.as_ref().unwrap().rows(), 32);
        assert_eq!(i.fasttime.as_ref().unwrap().dim(), (32, 32));
        assert!(i.periodogram.is_none());
        let o = inspect_trial(&s, 0, 20.0, EstimatorKind::OfdmBaseline).unwrap();
        assert_eq!(o.periodogram.as_ref().unwrap().dim(), (32, 32));
        assert_eq!(o.gains, i.gains);
    }
}
