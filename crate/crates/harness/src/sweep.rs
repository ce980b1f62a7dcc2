//! RMSE versus SNR sweeps and their CSV report.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EstimatorKind, Scenario, ScenarioConfig};
use crate::error::Result;
use crate::trial::{run_trial_snrs, TrialOutcome};

/// Rows with more censored trials than this fraction are flagged.
pub const CENSOR_FLAG_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmseRow {
    pub snr_db: f64,
    #[serde(serialize_with = "mode_name")]
    pub estimator_mode: EstimatorKind,
    #[serde(rename = "P")]
    pub p: usize,
    pub rmse_range_m: f64,
    pub rmse_velocity_mps: f64,
    pub trials: usize,
    pub resolution_range_m: f64,
    pub resolution_velocity_mps: f64,
    pub censored: usize,
    pub flagged: bool,
}

fn mode_name<S: serde::Serializer>(mode: &EstimatorKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(mode.name())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    /// Written as leading `#` lines.
    pub metadata: Vec<String>,
    pub rows: Vec<RmseRow>,
}

impl RmseReport {
    pub fn row(&self, mode: EstimatorKind, snr_db: f64) -> Option<&RmseRow> {
        self.rows.iter().find(|r| r.estimator_mode == mode && r.snr_db == snr_db)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for line in &self.metadata {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Root mean square over all matched errors of the non-censored trials.
fn aggregate(outcomes: &[&TrialOutcome]) -> (f64, f64, usize) {
    let mut sum_r = 0.0;
    let mut sum_v = 0.0;
    let mut count = 0usize;
    let mut censored = 0usize;
    for o in outcomes {
        match o.errors() {
            Some(errs) => {
                for e in errs {
                    sum_r += e.range_m * e.range_m;
                    sum_v += e.velocity_mps * e.velocity_mps;
                    count += 1;
                }
            }
            None => censored += 1,
        }
    }
    if count == 0 {
        return (f64::NAN, f64::NAN, censored);
    }
    ((sum_r / count as f64).sqrt(), (sum_v / count as f64).sqrt(), censored)
}

fn metadata(cfg: &ScenarioConfig, s: &Scenario) -> Result<Vec<String>> {
    let mut m = vec![
        format!("ddsense {}", env!("CARGO_PKG_VERSION")),
        format!("config_sha256 {}", cfg.hash()?),
        format!("seed {}", s.seed),
        format!(
            "frame M={} N={} delta_f_hz={} carrier_hz={} P={}",
            s.frame.m(),
            s.frame.n(),
            s.frame.delta_f(),
            s.frame.carrier(),
            s.p()
        ),
        "snr_db = 10 log10(1 / sigma^2): unit average symbol energy over complex noise variance per sample".into(),
        format!(
            "censoring: a trial whose estimator returns fewer than P peaks is excluded from the RMSE and counted in `censored`; rows with censored > {:.0}% of trials are flagged",
            CENSOR_FLAG_FRACTION * 100.0
        ),
        "gain: fixed magnitude, phase from the config or uniform per trial; symbols, gains and noise shape shared across SNR points".into(),
        "errors: circular delay/Doppler differences after minimum-cost matching, converted with the bin resolutions".into(),
    ];
    if s.modes.contains(&EstimatorKind::OfdmBaseline) {
        m.push(format!(
            "ofdm_baseline: reconstructed periodogram radar, cp_len={} zero_pad={}, integer bins only",
            s.cp_len, s.zero_pad
        ));
    }
    if s.shared_delay {
        m.push("warning: targets share an integer delay bin; estimates are not guaranteed".into());
    }
    Ok(m)
}

/// Runs every mode at every SNR. Trials run in parallel on the current rayon
/// pool; aggregation follows trial order, so the report does not depend on
/// the thread count.
pub fn rmse_sweep(cfg: &ScenarioConfig) -> Result<RmseReport> {
    let s = cfg.validate()?;
    let mut rows = Vec::new();
    for &mode in &s.modes {
        let outcomes: Vec<Vec<TrialOutcome>> = (0..s.trials as u64)
            .into_par_iter()
            .map(|t| run_trial_snrs(&s, t, mode, &s.snr_db))
            .collect::<Result<_>>()?;
        for (i, &snr_db) in s.snr_db.iter().enumerate() {
            let column: Vec<&TrialOutcome> = outcomes.iter().map(|o| &o[i]).collect();
            let (rmse_range_m, rmse_velocity_mps, censored) = aggregate(&column);
            rows.push(RmseRow {
                snr_db,
                estimator_mode: mode,
                p: s.p(),
                rmse_range_m,
                rmse_velocity_mps,
                trials: s.trials,
                resolution_range_m: s.frame.range_resolution(),
                resolution_velocity_mps: s.frame.velocity_resolution(),
                censored,
                flagged: censored as f64 > CENSOR_FLAG_FRACTION * s.trials as f64,
            });
        }
    }
    Ok(RmseReport { metadata: metadata(cfg, &s)?, rows })
}
