//! Scenario files.
//!
//! A scenario is a TOML document; the schema is described in `docs/config.md`
//! and versioned by `schema_version`. Unknown keys are rejected at every level.

use std::path::Path;

use clap::ValueEnum;
use ddsense::channel::{physical_to_indices, ChannelSpec, Target};
use ddsense::{Complex64, FrameConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Exhaustive association limits the target count.
pub const MAX_TARGETS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    /// Correlation peaks with difference-ratio refinement.
    #[serde(alias = "fractional_mode")]
    Fractional,
    /// Correlation peaks, bin centers only.
    #[serde(alias = "integer")]
    #[value(name = "integer", alias = "integer_only")]
    IntegerOnly,
    /// Periodogram OFDM radar, bin centers only.
    #[serde(alias = "ofdm")]
    #[value(name = "ofdm", alias = "ofdm_baseline")]
    OfdmBaseline,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Fractional => "fractional",
            EstimatorKind::IntegerOnly => "integer_only",
            EstimatorKind::OfdmBaseline => "ofdm_baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulationName {
    #[default]
    Qpsk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_delta_f")]
    pub delta_f_hz: f64,
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    #[serde(default)]
    pub modulation: ModulationName,
}

fn default_delta_f() -> f64 {
    39e3
}

fn default_carrier() -> f64 {
    24e9
}

/// One reflector, either physical (`range_m`, `velocity_mps`) or in grid
/// units (`l_tau`, `k_nu`). Without `gain_phase_rad` the phase is drawn
/// uniformly for every trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub velocity_mps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_nu: Option<f64>,
    #[serde(default = "default_gain")]
    pub gain_magnitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_phase_rad: Option<f64>,
}

fn default_gain() -> f64 {
    1.0
}

impl TargetSection {
    pub fn indices(l_tau: f64, k_nu: f64) -> Self {
        Self {
            range_m: None,
            velocity_mps: None,
            l_tau: Some(l_tau),
            k_nu: Some(k_nu),
            gain_magnitude: 1.0,
            gain_phase_rad: None,
        }
    }

    fn resolve(&self, cfg: &FrameConfig, i: usize) -> Result<TargetTruth> {
        let (l_tau, k_nu) = match (self.range_m, self.velocity_mps, self.l_tau, self.k_nu) {
            (Some(r), Some(v), None, None) => physical_to_indices(r, v, cfg)?,
            (None, None, Some(l), Some(k)) => (l, k),
            _ => {
                return Err(Error::Config(format!(
                    "target {i}: give either range_m and velocity_mps or l_tau and k_nu"
                )))
            }
        };
        if !(self.gain_magnitude.is_finite() && self.gain_magnitude > 0.0) {
            return Err(Error::Config(format!("target {i}: gain_magnitude must be positive")));
        }
        if let Some(p) = self.gain_phase_rad {
            if !p.is_finite() {
                return Err(Error::Config(format!("target {i}: gain_phase_rad must be finite")));
            }
        }
        Ok(TargetTruth {
            l_tau,
            k_nu,
            gain_magnitude: self.gain_magnitude,
            gain_phase_rad: self.gain_phase_rad,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub snr_db: Vec<f64>,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub modes: Vec<EstimatorKind>,
}

fn default_modes() -> Vec<EstimatorKind> {
    vec![EstimatorKind::Fractional, EstimatorKind::IntegerOnly]
}

/// Cyclic prefix length: `"auto"` or a sample count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CpSetting {
    Samples(usize),
    Named(String),
}

impl Default for CpSetting {
    fn default() -> Self {
        CpSetting::Named("auto".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OfdmSection {
    #[serde(default)]
    pub cp_len: CpSetting,
    #[serde(default = "default_zero_pad")]
    pub zero_pad: usize,
}

fn default_zero_pad() -> usize {
    1
}

impl Default for OfdmSection {
    fn default() -> Self {
        Self { cp_len: CpSetting::default(), zero_pad: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpSection {
    #[serde(default)]
    pub dd: bool,
    #[serde(default)]
    pub corr: bool,
    #[serde(default)]
    pub fasttime: bool,
    #[serde(default)]
    pub periodogram: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub frame: FrameSection,
    pub targets: Vec<TargetSection>,
    #[serde(default)]
    pub allow_shared_delay: bool,
    pub sweep: SweepSection,
    #[serde(default)]
    pub ofdm: OfdmSection,
    #[serde(default)]
    pub dump: DumpSection,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    /// Checks every field and resolves targets to grid units.
    pub fn validate(&self) -> Result<Scenario> {
        let f = &self.frame;
        let frame = FrameConfig::new(f.m, f.n, f.delta_f_hz, f.carrier_hz)?;
        if self.targets.is_empty() {
            return Err(Error::Config("at least one target is required".into()));
        }
        if self.targets.len() > MAX_TARGETS {
            return Err(Error::TooManyTargets { limit: MAX_TARGETS, found: self.targets.len() });
        }
        let targets = self
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| t.resolve(&frame, i))
            .collect::<Result<Vec<_>>>()?;
        let unit: Vec<Target> = targets.iter().map(|t| Target::unit(t.l_tau, t.k_nu)).collect::<ddsense::Result<_>>()?;
        let probe = if self.allow_shared_delay {
            ChannelSpec::allowing_shared_delay(frame, unit)?
        } else {
            ChannelSpec::new(frame, unit)?
        };

        let s = &self.sweep;
        if s.trials == 0 {
            return Err(Error::Config("sweep.trials must be at least 1".into()));
        }
        if s.snr_db.is_empty() {
            return Err(Error::Config("sweep.snr_db must list at least one value".into()));
        }
        if s.snr_db.iter().any(|x| x.is_nan() || *x == f64::NEG_INFINITY) {
            return Err(Error::Config("sweep.snr_db values must be numbers or +inf".into()));
        }
        if s.modes.is_empty() {
            return Err(Error::Config("sweep.modes must list at least one estimator".into()));
        }

        if self.ofdm.zero_pad == 0 {
            return Err(Error::Config("ofdm.zero_pad must be at least 1".into()));
        }
        let cp_len = match &self.ofdm.cp_len {
            CpSetting::Samples(n) => *n,
            CpSetting::Named(s) if s == "auto" => {
                let max_delay = targets.iter().map(|t| t.l_tau).fold(0.0, f64::max);
                (max_delay.ceil() as usize).min(frame.m())
            }
            CpSetting::Named(s) => {
                return Err(Error::Config(format!("ofdm.cp_len must be \"auto\" or a sample count, got {s:?}")))
            }
        };
        if cp_len > frame.m() {
            return Err(Error::Config(format!("ofdm.cp_len {cp_len} exceeds M = {}", frame.m())));
        }
        if s.modes.contains(&EstimatorKind::OfdmBaseline) {
            // slots last (M + cp)/M times longer, so periodogram bins fold sooner
            let stretch = (frame.m() + cp_len) as f64 / frame.m() as f64;
            let limit = frame.n() as f64 / 2.0;
            if let Some((i, t)) = targets.iter().enumerate().find(|(_, t)| {
                let k = t.k_nu * stretch;
                k < -limit || k >= limit
            }) {
                return Err(Error::Config(format!(
                    "target {i}: Doppler index {:.3} folds in the OFDM periodogram with cp_len {cp_len} (limit {:.3})",
                    t.k_nu,
                    limit / stretch
                )));
            }
        }

        Ok(Scenario {
            frame,
            targets,
            shared_delay: probe.has_shared_delay(),
            allow_shared_delay: self.allow_shared_delay,
            snr_db: s.snr_db.clone(),
            trials: s.trials,
            seed: s.seed,
            modes: s.modes.clone(),
            cp_len,
            zero_pad: self.ofdm.zero_pad,
            dump: self.dump,
        })
    }
}

/// True reflector in grid units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetTruth {
    pub l_tau: f64,
    pub k_nu: f64,
    pub gain_magnitude: f64,
    pub gain_phase_rad: Option<f64>,
}

impl TargetTruth {
    pub fn gain(&self, random_phase: f64) -> Complex64 {
        Complex64::from_polar(self.gain_magnitude, self.gain_phase_rad.unwrap_or(random_phase))
    }
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub frame: FrameConfig,
    pub targets: Vec<TargetTruth>,
    /// Two targets share an integer delay bin (only possible with `allow_shared_delay`).
    pub shared_delay: bool,
    pub allow_shared_delay: bool,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub modes: Vec<EstimatorKind>,
    pub cp_len: usize,
    pub zero_pad: usize,
    pub dump: DumpSection,
}

impl Scenario {
    pub fn p(&self) -> usize {
        self.targets.len()
    }

    /// Channel with the given per-target gains.
    pub fn channel(&self, gains: &[Complex64]) -> Result<ChannelSpec> {
        let targets = self
            .targets
            .iter()
            .zip(gains)
            .map(|(t, &g)| Target::new(g, t.l_tau, t.k_nu))
            .collect::<ddsense::Result<Vec<_>>>()?;
        Ok(if self.allow_shared_delay {
            ChannelSpec::allowing_shared_delay(self.frame, targets)?
        } else {
            ChannelSpec::new(self.frame, targets)?
        })
    }
}
