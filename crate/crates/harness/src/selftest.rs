//! Oracle checks runnable from the command line. Each check compares the
//! library against a direct evaluation of the defining sum on a small frame.

use std::f64::consts::PI;

use ddsense::channel::{apply_channel, ChannelSpec, Target};
use ddsense::estimator::{correlate2d_fast, correlate2d_reference, estimate_targets, estimates_from_map, expected_correlation};
use ddsense::modem::{demodulate, dzt_demod, heisenberg_rect, isfft, modulate, sfft, wigner_rect};
use ddsense::ofdm::{apply_channel_ofdm, ofdm_demodulate, ofdm_estimates, ofdm_modulate, ofdm_periodogram};
use ddsense::symbols::random_symbol_grid;
use ddsense::{Complex64, DDGrid, EstimatorMode, FrameConfig, RngStream, TFGrid, TimeSeries};
use ndarray::Array2;
use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn cis(p: f64) -> Complex64 {
    Complex64::from_polar(1.0, p)
}

fn grid(n: usize, m: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = RngStream::new(seed, 0).rng();
    Array2::from_shape_fn((n, m), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn within(name: &'static str, err: f64, tol: f64) -> Check {
    Check { name, passed: err < tol, detail: format!("max error {err:.2e} (tolerance {tol:.0e})") }
}

fn isfft_check() -> ddsense::Result<Check> {
    let (n, m) = (4, 8);
    let cfg = FrameConfig::with_grid(m, n)?;
    let x = grid(n, m, 1);
    let s = 1.0 / ((n * m) as f64).sqrt();
    let direct = Array2::from_shape_fn((n, m), |(a, b)| {
        let mut acc = Complex64::default();
        for ((k, l), v) in x.indexed_iter() {
            acc += v * cis(2.0 * PI * ((a * k) as f64 / n as f64 - (b * l) as f64 / m as f64));
        }
        acc * s
    });
    let tf = isfft(&cfg, &DDGrid::from_array(x.clone()))?;
    let back = sfft(&cfg, &tf)?;
    Ok(within("isfft/sfft against double sums", max_diff(tf.as_array(), &direct).max(max_diff(back.as_array(), &x)), 1e-12))
}

fn heisenberg_check() -> ddsense::Result<Check> {
    let (n, m) = (3, 8);
    let cfg = FrameConfig::with_grid(m, n)?;
    let x = grid(n, m, 2);
    let s = heisenberg_rect(&cfg, &TFGrid::from_array(x.clone()))?;
    let mut err: f64 = 0.0;
    for (q, z) in s.samples().iter().enumerate() {
        let (blk, t) = (q / m, q % m);
        let direct: Complex64 =
            (0..m).map(|f| x[(blk, f)] * cis(2.0 * PI * (f * t) as f64 / m as f64)).sum::<Complex64>() / (m as f64).sqrt();
        err = err.max((z - direct).norm());
    }
    err = err.max(max_diff(wigner_rect(&cfg, &s)?.as_array(), &x));
    Ok(within("heisenberg/wigner against block sums", err, 1e-12))
}

fn dzt_check() -> ddsense::Result<Check> {
    let (n, m) = (16, 32);
    let cfg = FrameConfig::with_grid(m, n)?;
    let r = TimeSeries::new(&cfg, grid(1, m * n, 3).into_iter().collect())?;
    let a = dzt_demod(&cfg, &r)?;
    let b = sfft(&cfg, &wigner_rect(&cfg, &r)?)?;
    let direct = Array2::from_shape_fn((n, m), |(k, l)| {
        (0..n).map(|i| r.samples()[l + i * m] * cis(-2.0 * PI * (i * k) as f64 / n as f64)).sum::<Complex64>()
            / (n as f64).sqrt()
    });
    let err = a.max_abs_diff(&b).max(max_diff(a.as_array(), &direct));
    Ok(within("zak demodulation equals sfft after wigner", err, 1e-10))
}

fn round_trip_check() -> ddsense::Result<Check> {
    let cfg = FrameConfig::with_grid(128, 64)?;
    let x: DDGrid = random_symbol_grid(&cfg, &mut RngStream::new(4, 0).rng());
    let err = demodulate(&cfg, &modulate(&cfg, &x)?)?.max_abs_diff(&x);
    Ok(within("modem round trip at 128 x 64", err, 1e-10))
}

fn io_relation_check() -> ddsense::Result<Check> {
    let (n, m) = (16, 16);
    let cfg = FrameConfig::with_grid(m, n)?;
    let taps = [(Complex64::new(0.8, 0.1), 3i64, 2i64), (Complex64::new(-0.3, 0.9), 12, -5), (Complex64::new(0.5, 0.0), 0, 7)];
    let spec = ChannelSpec::new(
        cfg,
        taps.iter().map(|&(h, l, k)| Target::new(h, l as f64, k as f64)).collect::<ddsense::Result<_>>()?,
    )?;
    let x: DDGrid = random_symbol_grid(&cfg, &mut RngStream::new(5, 0).rng());
    let y = dzt_demod(&cfg, &apply_channel(&modulate(&cfg, &x)?, &spec)?)?;
    let xa = x.as_array();
    let direct = Array2::from_shape_fn((n, m), |(k, l)| {
        taps.iter()
            .map(|&(h, dl0, dk0)| {
                let dk = k as i64 - dk0;
                let dl = l as i64 - dl0;
                let alpha = if dl >= 0 { cis(0.0) } else { cis(-2.0 * PI * dk as f64 / n as f64) };
                h * cis(2.0 * PI * (dl * dk0) as f64 / (n * m) as f64)
                    * alpha
                    * xa[(dk.rem_euclid(n as i64) as usize, dl.rem_euclid(m as i64) as usize)]
            })
            .sum()
    });
    Ok(within("integer channel against the dd input/output relation", max_diff(y.as_array(), &direct), 1e-9))
}

fn correlation_check() -> ddsense::Result<Check> {
    let mut err: f64 = 0.0;
    for (m, n) in [(8, 8), (32, 16)] {
        let x = DDGrid::from_array(grid(n, m, 6));
        let y = DDGrid::from_array(grid(n, m, 7));
        err = err.max(correlate2d_fast(&y, &x)?.max_abs_diff(&correlate2d_reference(&y, &x)?));
    }
    Ok(within("fast correlation equals direct correlation", err, 1e-9))
}

fn peak_check() -> ddsense::Result<Check> {
    let cfg = FrameConfig::with_grid(16, 16)?;
    let h = Complex64::new(0.6, -0.8);
    let spec = ChannelSpec::new(cfg, vec![Target::new(h, 5.0, -3.0)?])?;
    let x: DDGrid = random_symbol_grid(&cfg, &mut RngStream::new(8, 0).rng());
    let y = dzt_demod(&cfg, &apply_channel(&modulate(&cfg, &x)?, &spec)?)?;
    let v = correlate2d_fast(&y, &x)?;
    let peak = v.values()[(13, 5)];
    let err = (peak - h.conj() * 256.0).norm() / 256.0;
    let unique = v.magnitudes().indexed_iter().all(|(idx, &a)| idx == (13, 5) || a < peak.norm());
    let mut c = within("matched peak equals MN conj(h)", err, 1e-9);
    c.passed &= unique;
    Ok(c)
}

fn ratio_check() -> ddsense::Result<Check> {
    let cfg = FrameConfig::with_grid(16, 16)?;
    let bound = 10.0 / 256.0;
    let mut worst: f64 = 0.0;
    for f in [-0.4, -0.2, 0.1, 0.3] {
        let spec = ChannelSpec::new(cfg, vec![Target::unit(6.0, 2.0 + f)?])?;
        let v = expected_correlation(&spec);
        let k2 = if f > 0.0 { 3 } else { 1 };
        let ratio = v.magnitude(2, 6) / v.magnitude(k2, 6);
        let ideal = ((k2 as f64 - 2.0) - f).abs() / f.abs();
        worst = worst.max((ratio / ideal - 1.0).abs());
        let e = estimates_from_map(&cfg, &v, 1, EstimatorMode::Fractional)?[0];
        worst = worst.max((e.k_nu_hat - 2.0 - f).abs());
    }
    Ok(within("difference ratio on the data-averaged correlation", worst, bound))
}

fn resolution_check() -> ddsense::Result<Check> {
    let cfg = FrameConfig::new(128, 64, 39e3, 24e9)?;
    let (r, v) = (cfg.range_resolution(), cfg.velocity_resolution());
    Ok(Check {
        name: "resolution of the 128 x 64, 39 kHz, 24 GHz frame",
        passed: (r - 30.0).abs() <= 0.5 && (v - 3.81).abs() <= 0.05,
        detail: format!("{r:.3} m, {v:.4} m/s"),
    })
}

fn ofdm_parity_check() -> ddsense::Result<Check> {
    let cfg = FrameConfig::with_grid(32, 32)?;
    let targets = vec![Target::unit(4.0, 3.0)?, Target::unit(17.0, -6.0)?, Target::unit(9.0, 7.0)?];
    let spec = ChannelSpec::new(cfg, targets)?;
    let x: DDGrid = random_symbol_grid(&cfg, &mut RngStream::new(9, 0).rng());
    let y = dzt_demod(&cfg, &apply_channel(&modulate(&cfg, &x)?, &spec)?)?;
    let otfs = estimate_targets(&cfg, &y, &x, 3, EstimatorMode::IntegerOnly)?;
    let xt: TFGrid = random_symbol_grid(&cfg, &mut RngStream::new(9, 1).rng());
    let frame = apply_channel_ofdm(&ofdm_modulate(&cfg, &xt, 17)?, &spec);
    let pg = ofdm_periodogram(&ofdm_demodulate(&cfg, &frame)?, &xt, 1)?;
    let ofdm = ofdm_estimates(&cfg, &pg, 3, 1, 17)?;
    let bins = |e: &[ddsense::TargetEstimate]| {
        let mut b: Vec<(i64, i64)> = e.iter().map(|t| (t.l_tau_hat.round() as i64, t.k_nu_hat.round() as i64)).collect();
        b.sort();
        b
    };
    let (a, b) = (bins(&otfs), bins(&ofdm));
    Ok(Check { name: "ofdm and integer-mode otfs find the same bins", passed: a == b, detail: format!("{a:?} / {b:?}") })
}

pub fn run_all() -> Vec<Check> {
    let checks: [fn() -> ddsense::Result<Check>; 10] = [
        isfft_check,
        heisenberg_check,
        dzt_check,
        round_trip_check,
        io_relation_check,
        correlation_check,
        peak_check,
        ratio_check,
        resolution_check,
        ofdm_parity_check,
    ];
    checks
        .iter()
        .map(|c| {
            c().unwrap_or_else(|e| Check { name: "setup", passed: false, detail: e.to_string() })
        })
        .collect()
}
