//! Bit-to-symbol mapping.

use std::f64::consts::FRAC_1_SQRT_2;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;

use crate::config::{FrameConfig, Modulation};
use crate::error::{Error, Result};
use crate::grid::Grid;

/// Gray-mapped QPSK: `00 -> (1+j)`, `01 -> (-1+j)`, `11 -> (-1-j)`, `10 -> (1-j)`, all over sqrt(2).
pub fn qpsk_map(bits: &[bool]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::OddBitCount(bits.len()));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|pair| {
            let re = if pair[1] { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
            let im = if pair[0] { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
            Complex64::new(re, im)
        })
        .collect())
}

pub fn random_bits<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<bool> {
    (0..count).map(|_| rng.random::<bool>()).collect()
}

/// Fills an `N x M` grid (either domain) with unit-power random symbols, row-major.
pub fn random_symbol_grid<D, R: Rng + ?Sized>(cfg: &FrameConfig, rng: &mut R) -> Grid<D> {
    let symbols = match cfg.modulation() {
        Modulation::Qpsk => {
            let bits = random_bits(rng, 2 * cfg.frame_len());
            qpsk_map(&bits).expect("bit count is even")
        }
    };
    let data = Array2::from_shape_vec((cfg.n(), cfg.m()), symbols).expect("frame_len symbols");
    Grid::from_array(data)
}
