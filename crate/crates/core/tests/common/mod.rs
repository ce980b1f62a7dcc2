//! Brute-force oracles shared by the integration tests. Everything here is
//! written from the defining sums, independently of the library transforms.

#![allow(dead_code)]

use std::f64::consts::PI;

use ddsense::{Complex64, DDGrid, FrameConfig, TimeSeries};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn cis(phase: f64) -> Complex64 {
    Complex64::from_polar(1.0, phase)
}

pub fn cfg(m: usize, n: usize) -> FrameConfig {
    FrameConfig::with_grid(m, n).unwrap()
}

pub fn random_complex(rows: usize, cols: usize, seed: u64) -> Array2<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((rows, cols), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_series(cfg: &FrameConfig, seed: u64) -> TimeSeries {
    let a = random_complex(1, cfg.frame_len(), seed);
    TimeSeries::new(cfg, a.into_iter().collect()).unwrap()
}

pub fn qpsk_grid(cfg: &FrameConfig, seed: u64) -> DDGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ddsense::symbols::random_symbol_grid(cfg, &mut rng)
}

pub fn max_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `X_TF[n,m] = 1/sqrt(NM) sum_k sum_l X[k,l] e^{j2pi(nk/N - ml/M)}`
pub fn isfft_sum(x: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, m) = x.dim();
    let s = 1.0 / ((n * m) as f64).sqrt();
    Array2::from_shape_fn((n, m), |(nn, mm)| {
        let mut acc = Complex64::default();
        for k in 0..n {
            for l in 0..m {
                let ph = 2.0 * PI * ((nn * k) as f64 / n as f64 - (mm * l) as f64 / m as f64);
                acc += x[(k, l)] * cis(ph);
            }
        }
        acc * s
    })
}

/// `Y_DD[k,l] = 1/sqrt(NM) sum_n sum_m Y[n,m] e^{-j2pi(nk/N - ml/M)}`
pub fn sfft_sum(y: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, m) = y.dim();
    let s = 1.0 / ((n * m) as f64).sqrt();
    Array2::from_shape_fn((n, m), |(k, l)| {
        let mut acc = Complex64::default();
        for nn in 0..n {
            for mm in 0..m {
                let ph = -2.0 * PI * ((nn * k) as f64 / n as f64 - (mm * l) as f64 / m as f64);
                acc += y[(nn, mm)] * cis(ph);
            }
        }
        acc * s
    })
}

/// Continuous Heisenberg transform with the energy-normalized rectangular pulse
/// `g(t) = 1/sqrt(T)` on `[0, T)`, evaluated at time `t`.
pub fn heisenberg_continuous(x_tf: &Array2<Complex64>, delta_f: f64, t: f64) -> Complex64 {
    let (n, m) = x_tf.dim();
    let big_t = 1.0 / delta_f;
    let mut acc = Complex64::default();
    for nn in 0..n {
        let local = t - nn as f64 * big_t;
        if !(0.0..big_t).contains(&local) {
            continue;
        }
        let g = 1.0 / big_t.sqrt();
        for mm in 0..m {
            acc += x_tf[(nn, mm)] * g * cis(2.0 * PI * mm as f64 * delta_f * local);
        }
    }
    acc
}

/// `Y_TF[n,m] = 1/sqrt(M) sum_q r[nM + q] e^{-j2pi mq/M}`
pub fn wigner_sum(r: &[Complex64], n: usize, m: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, m), |(nn, mm)| {
        (0..m)
            .map(|q| r[nn * m + q] * cis(-2.0 * PI * (mm * q) as f64 / m as f64))
            .sum::<Complex64>()
            / (m as f64).sqrt()
    })
}

/// `Y_DD[k,l] = 1/sqrt(N) sum_n y[l + nM] e^{-j2pi nk/N}`
pub fn dzt_sum(y: &[Complex64], n: usize, m: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((n, m), |(k, l)| {
        (0..n)
            .map(|nn| y[l + nn * m] * cis(-2.0 * PI * (nn * k) as f64 / n as f64))
            .sum::<Complex64>()
            / (n as f64).sqrt()
    })
}

/// Integer-index delay-Doppler input/output relation with the wrap phase:
/// `Y[k,l] = sum_i h_i e^{j2pi (l - L_i) K_i/(MN)} alpha(k - K_i, l - L_i) X[[k-K_i]_N, [l-L_i]_M]`
pub fn dd_io_relation(x: &Array2<Complex64>, taps: &[(Complex64, i64, i64)]) -> Array2<Complex64> {
    let (n, m) = x.dim();
    let (ni, mi) = (n as i64, m as i64);
    let mn = (n * m) as f64;
    Array2::from_shape_fn((n, m), |(k, l)| {
        let (k, l) = (k as i64, l as i64);
        taps.iter()
            .map(|&(h, delay, doppler)| {
                let dk = k - doppler;
                let dl = l - delay;
                let alpha = if dl >= 0 { cis(0.0) } else { cis(-2.0 * PI * dk as f64 / n as f64) };
                h * cis(2.0 * PI * (dl * doppler) as f64 / mn)
                    * alpha
                    * x[(dk.rem_euclid(ni) as usize, dl.rem_euclid(mi) as usize)]
            })
            .sum()
    })
}

/// Dirichlet kernel magnitude `|sin(pi x) / (N sin(pi x / N))|`, the leakage of an
/// off-grid tone over `N` samples.
pub fn dirichlet(x: f64, n: usize) -> f64 {
    if x.abs() < 1e-15 {
        return 1.0;
    }
    ((PI * x).sin() / (n as f64 * (PI * x / n as f64).sin())).abs()
}

/// Phase-corrected correlation written straight from the definition:
/// `V[k,l] = sum_n sum_m conj(Y[n,m]) X[[n-k]_N,[m-l]_M] alpha(n-k, m-l) e^{j2pi (m-l) k_s/(NM)}`
/// with `k_s` the signed Doppler of row `k`.
pub fn correlation_sum(y: &Array2<Complex64>, x: &Array2<Complex64>) -> Array2<Complex64> {
    let (n, m) = x.dim();
    let (ni, mi) = (n as i64, m as i64);
    Array2::from_shape_fn((n, m), |(k, l)| {
        let ks = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
        let mut acc = Complex64::default();
        for nn in 0..ni {
            for mm in 0..mi {
                let dk = nn - k as i64;
                let dl = mm - l as i64;
                let alpha = if dl >= 0 { cis(0.0) } else { cis(-2.0 * PI * dk as f64 / n as f64) };
                acc += y[(nn as usize, mm as usize)].conj()
                    * x[(dk.rem_euclid(ni) as usize, dl.rem_euclid(mi) as usize)]
                    * alpha
                    * cis(2.0 * PI * dl as f64 * ks / (n * m) as f64);
            }
        }
        acc
    })
}
