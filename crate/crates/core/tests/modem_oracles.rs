mod common;

use common::*;
use ddsense::modem::*;
use ddsense::{Complex64, DDGrid, TFGrid, TimeSeries};
use ndarray::Array2;
use proptest::prelude::*;

#[test]
fn isfft_matches_double_sum() {
    let c = cfg(4, 4);
    let x = random_complex(4, 4, 1);
    let tf = isfft(&c, &DDGrid::from_array(x.clone())).unwrap();
    assert!(max_diff(tf.as_array(), &isfft_sum(&x)) < 1e-12);
    let rel = (tf.energy() - x.iter().map(|z| z.norm_sqr()).sum::<f64>()).abs() / tf.energy();
    assert!(rel < 1e-10);
}

#[test]
fn sfft_matches_double_sum() {
    // 3 slots, 5 subcarriers
    let c = cfg(5, 3);
    let y = random_complex(3, 5, 2);
    let dd = sfft(&c, &TFGrid::from_array(y.clone())).unwrap();
    assert!(max_diff(dd.as_array(), &sfft_sum(&y)) < 1e-12);
}

#[test]
fn constant_tf_grid_is_an_impulse() {
    let c = cfg(8, 4);
    let v = Complex64::new(1.0 / 32f64.sqrt(), 0.0);
    let dd = sfft(&c, &TFGrid::from_array(Array2::from_elem((4, 8), v))).unwrap();
    assert!(dd.max_abs_diff(&DDGrid::impulse(&c, 0, 0)) < 1e-15);
}

#[test]
fn heisenberg_matches_sampled_continuous_waveform() {
    let c = ddsense::FrameConfig::new(8, 3, 15e3, 5e9).unwrap();
    let x = random_complex(3, 8, 3);
    let s = heisenberg_rect(&c, &TFGrid::from_array(x.clone())).unwrap();
    let big_t = c.symbol_duration();
    // discrete samples carry the pulse energy of one sampling interval T/M
    let norm = (big_t / c.m() as f64).sqrt();
    for (q, z) in s.samples().iter().enumerate() {
        let t = q as f64 * big_t / c.m() as f64;
        let expect = heisenberg_continuous(&x, c.delta_f(), t) * norm;
        assert!((z - expect).norm() < 1e-12, "q={q}");
    }
    let rel = (s.energy() - x.iter().map(|z| z.norm_sqr()).sum::<f64>()).abs() / s.energy();
    assert!(rel < 1e-10);
}

#[test]
fn wigner_matches_direct_sum_and_inverts_heisenberg() {
    let c = cfg(6, 4);
    let r = random_series(&c, 4);
    let tf = wigner_rect(&c, &r).unwrap();
    assert!(max_diff(tf.as_array(), &wigner_sum(r.samples(), 4, 6)) < 1e-12);
    let back = heisenberg_rect(&c, &tf).unwrap();
    assert!(back.max_abs_diff(&r) < 1e-11);
    let tf2 = wigner_rect(&c, &heisenberg_rect(&c, &tf).unwrap()).unwrap();
    assert!(tf2.max_abs_diff(&tf) < 1e-11);
}

#[test]
fn dzt_matches_direct_sum() {
    let c = cfg(4, 3);
    let y = random_series(&c, 5);
    let dd = dzt_demod(&c, &y).unwrap();
    assert!(max_diff(dd.as_array(), &dzt_sum(y.samples(), 3, 4)) < 1e-12);
}

#[test]
fn dzt_equals_sfft_after_wigner() {
    for (m, n, seed) in [(4, 3, 6), (16, 8, 7), (128, 64, 8), (10, 7, 9)] {
        let c = cfg(m, n);
        let r = random_series(&c, seed);
        let a = dzt_demod(&c, &r).unwrap();
        let b = sfft(&c, &wigner_rect(&c, &r).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-10, "{m}x{n}");
    }
}

#[test]
fn slow_time_dft_of_fasttime_matrix_is_the_dd_grid() {
    let c = cfg(8, 5);
    let r = random_series(&c, 10);
    let ft = fasttime_slowtime(&c, &r).unwrap();
    let dd = dzt_demod(&c, &r).unwrap();
    for l in 0..8 {
        let row: Vec<Complex64> = ft.row(l).to_vec();
        let spec = ddsense::dft::dft(&row, false).unwrap();
        for (k, z) in spec.iter().enumerate() {
            assert!((z - dd.as_array()[(k, l)]).norm() < 1e-12);
        }
    }
    assert_eq!(flatten_fasttime(&c, &ft).unwrap(), r);
}

#[test]
fn modulated_impulse_matches_composed_oracles() {
    let c = cfg(8, 4);
    let x = DDGrid::impulse(&c, 0, 0);
    let s = modulate(&c, &x).unwrap();
    let tf = isfft_sum(x.as_array());
    for (q, z) in s.samples().iter().enumerate() {
        let (nn, mm) = (q / 8, q % 8);
        let direct: Complex64 = (0..8)
            .map(|f| tf[(nn, f)] * cis(2.0 * std::f64::consts::PI * (f * mm) as f64 / 8.0))
            .sum::<Complex64>()
            / 8f64.sqrt();
        assert!((z - direct).norm() < 1e-12);
    }
    // the impulse at the origin puts 1/sqrt(N) at the start of every block
    for (q, z) in s.samples().iter().enumerate() {
        let expect = if q % 8 == 0 { 0.5 } else { 0.0 };
        assert!((z.norm() - expect).abs() < 1e-12);
    }
}

#[test]
fn round_trip_on_qpsk_frame() {
    let c = cfg(32, 16);
    let x = qpsk_grid(&c, 11);
    let s = modulate(&c, &x).unwrap();
    assert!((s.energy() - x.energy()).abs() / x.energy() < 1e-10);
    assert!(demodulate(&c, &s).unwrap().max_abs_diff(&x) < 1e-10);
    assert!(dzt_demod(&c, &s).unwrap().max_abs_diff(&x) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn perfect_reconstruction(m in 2usize..20, n in 2usize..20, seed in any::<u64>()) {
        let c = cfg(m, n);
        let x = DDGrid::from_array(random_complex(n, m, seed));
        let s = modulate(&c, &x).unwrap();
        prop_assert!(demodulate(&c, &s).unwrap().max_abs_diff(&x) < 1e-10);
        prop_assert!((s.energy() - x.energy()).abs() <= 1e-10 * x.energy());
    }

    #[test]
    fn zak_path_equivalence(m in 2usize..24, n in 2usize..24, seed in any::<u64>()) {
        let c = cfg(m, n);
        let r: TimeSeries = random_series(&c, seed);
        let a = dzt_demod(&c, &r).unwrap();
        let b = demodulate(&c, &r).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-10);
        prop_assert!((a.energy() - r.energy()).abs() <= 1e-10 * r.energy());
    }
}
