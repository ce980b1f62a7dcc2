use super::{CorrelationMap, Peak};
use crate::channel::indices_to_physical;
use crate::config::FrameConfig;
use crate::index::{signed_doppler, wrap};

/// Delay/Doppler estimate for one detected target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetEstimate {
    pub k_int: usize,
    pub l_int: usize,
    /// `l_int + iota_hat`; may dip below zero for a target just after the frame start.
    pub l_tau_hat: f64,
    /// `signed(k_int) + kappa_hat`.
    pub k_nu_hat: f64,
    pub range_hat_m: f64,
    pub velocity_hat_mps: f64,
    pub peak_magnitude: f64,
    /// Both magnitudes entering a ratio were zero; that fractional part is reported as 0.
    pub degenerate: bool,
}

impl TargetEstimate {
    fn from_parts(peak: &Peak, iota: f64, kappa: f64, degenerate: bool, cfg: &FrameConfig) -> Self {
        let l_tau_hat = peak.l_int as f64 + iota;
        let k_nu_hat = signed_doppler(peak.k_int as i64, cfg.n()) as f64 + kappa;
        let (range_hat_m, velocity_hat_mps) = indices_to_physical(l_tau_hat, k_nu_hat, cfg);
        Self {
            k_int: peak.k_int,
            l_int: peak.l_int,
            l_tau_hat,
            k_nu_hat,
            range_hat_m,
            velocity_hat_mps,
            peak_magnitude: peak.magnitude,
            degenerate,
        }
    }

    /// Estimate at the bin center, no fractional refinement.
    pub fn integer(peak: &Peak, cfg: &FrameConfig) -> Self {
        Self::from_parts(peak, 0.0, 0.0, false, cfg)
    }
}

/// Difference-ratio offset: `step * |V2| / (|V1| + |V2|)` where `step = +-1` points
/// from the strongest bin toward the stronger neighbor. `None` when both are zero.
pub fn fractional_offset(mag_first: f64, mag_second: f64, step: i64) -> Option<f64> {
    let denom = mag_first + mag_second;
    if !(denom > 0.0) {
        return None;
    }
    Some(step as f64 * mag_second / denom)
}

/// Fractional refinement of each peak along its Doppler column and its delay row.
///
/// The second bin is whichever circular neighbor (`+1` or `-1`) is stronger;
/// a tie goes to `-1`.
pub fn refine_fractional(v: &CorrelationMap, peaks: &[Peak], cfg: &FrameConfig) -> Vec<TargetEstimate> {
    let (n, m) = (v.rows(), v.cols());
    peaks
        .iter()
        .map(|p| {
            let (k, l) = (p.k_int as i64, p.l_int as i64);
            let first = v.magnitude(p.k_int, p.l_int);

            let up = v.magnitude(wrap(k + 1, n), p.l_int);
            let down = v.magnitude(wrap(k - 1, n), p.l_int);
            let (k_step, k_second) = if up > down { (1, up) } else { (-1, down) };
            let kappa = fractional_offset(first, k_second, k_step);

            let right = v.magnitude(p.k_int, wrap(l + 1, m));
            let left = v.magnitude(p.k_int, wrap(l - 1, m));
            let (l_step, l_second) = if right > left { (1, right) } else { (-1, left) };
            let iota = fractional_offset(first, l_second, l_step);

            let degenerate = kappa.is_none() || iota.is_none();
            TargetEstimate::from_parts(p, iota.unwrap_or(0.0), kappa.unwrap_or(0.0), degenerate, cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use num_complex::Complex64;

    #[test]
    fn ratio_edge_values() {
        assert_eq!(fractional_offset(5.0, 0.0, 1), Some(0.0));
        assert_eq!(fractional_offset(5.0, 5.0, 1), Some(0.5));
        assert_eq!(fractional_offset(5.0, 5.0, -1), Some(-0.5));
        assert_eq!(fractional_offset(0.0, 0.0, 1), None);
        assert!((fractional_offset(3.0, 1.0, -1).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn reads_neighbors_across_the_edge() {
        let cfg = FrameConfig::with_grid(8, 8).unwrap();
        let mut a = Array2::from_elem((8, 8), Complex64::new(0.0, 0.0));
        a[(0, 0)] = Complex64::new(3.0, 0.0);
        a[(7, 0)] = Complex64::new(0.0, 1.0); // Doppler -1
        a[(0, 7)] = Complex64::new(-1.0, 0.0); // delay -1
        a[(0, 1)] = Complex64::new(0.5, 0.0);
        let v = CorrelationMap::new(a);
        let peak = Peak { k_int: 0, l_int: 0, magnitude: 3.0 };
        let est = refine_fractional(&v, &[peak], &cfg)[0];
        assert!((est.k_nu_hat + 0.25).abs() < 1e-15);
        assert!((est.l_tau_hat + 0.25).abs() < 1e-15);
        assert!(!est.degenerate);
        let (r, vel) = indices_to_physical(-0.25, -0.25, &cfg);
        assert_eq!((est.range_hat_m, est.velocity_hat_mps), (r, vel));
    }

    #[test]
    fn zero_map_is_flagged() {
        let cfg = FrameConfig::with_grid(4, 4).unwrap();
        let v = CorrelationMap::new(Array2::zeros((4, 4)));
        let est = refine_fractional(&v, &[Peak { k_int: 3, l_int: 1, magnitude: 0.0 }], &cfg)[0];
        assert!(est.degenerate);
        assert_eq!((est.k_nu_hat, est.l_tau_hat), (-1.0, 1.0));
    }
}
