use std::cmp::Ordering;

use ndarray::Array2;

use super::CorrelationMap;
use crate::error::{Error, Result};
use crate::index::signed_doppler;

/// Integer location of a local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Doppler row in `[0, N)`.
    pub k_int: usize,
    /// Delay column in `[0, M)`.
    pub l_int: usize,
    pub magnitude: f64,
}

impl Peak {
    pub fn signed_k(&self, n: usize) -> i64 {
        signed_doppler(self.k_int as i64, n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakOptions {
    /// Skip candidates inside the 8-neighborhood of an already accepted peak.
    pub exclude_neighbors: bool,
}

impl Default for PeakOptions {
    fn default() -> Self {
        Self { exclude_neighbors: true }
    }
}

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

fn wrap(i: isize, n: usize) -> usize {
    i.rem_euclid(n as isize) as usize
}

/// Entries strictly larger than all eight circular neighbors.
pub fn local_maxima(mags: &Array2<f64>) -> Vec<Peak> {
    let (n, m) = mags.dim();
    let mut out = Vec::new();
    for k in 0..n {
        for l in 0..m {
            let c = mags[(k, l)];
            let is_max = NEIGHBORS.iter().all(|&(dk, dl)| {
                let nb = (wrap(k as isize + dk, n), wrap(l as isize + dl, m));
                nb == (k, l) || c > mags[nb]
            });
            if is_max {
                out.push(Peak { k_int: k, l_int: l, magnitude: c });
            }
        }
    }
    out
}

fn is_neighbor(a: &Peak, b: &Peak, n: usize, m: usize) -> bool {
    NEIGHBORS
        .iter()
        .any(|&(dk, dl)| wrap(a.k_int as isize + dk, n) == b.k_int && wrap(a.l_int as isize + dl, m) == b.l_int)
}

/// The `p` strongest local maxima of `|V|`.
pub fn pick_peaks(v: &CorrelationMap, p: usize) -> Result<Vec<Peak>> {
    pick_peaks_in(&v.magnitudes(), p, PeakOptions::default())
}

/// Peak selection over any nonnegative map with rows as Doppler bins.
///
/// Candidates are ranked by magnitude, ties broken by smaller signed Doppler,
/// then smaller delay.
pub fn pick_peaks_in(mags: &Array2<f64>, p: usize, opts: PeakOptions) -> Result<Vec<Peak>> {
    if p == 0 {
        return Err(Error::InvalidConfig("peak count must be at least 1".into()));
    }
    let (n, m) = mags.dim();
    let mut candidates = local_maxima(mags);
    candidates.sort_by(|a, b| {
        b.magnitude
            .partial_cmp(&a.magnitude)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.signed_k(n).cmp(&b.signed_k(n)))
            .then_with(|| a.l_int.cmp(&b.l_int))
    });
    let mut picked: Vec<Peak> = Vec::with_capacity(p);
    for c in candidates {
        if picked.len() == p {
            break;
        }
        if opts.exclude_neighbors && picked.iter().any(|q| is_neighbor(q, &c, n, m)) {
            continue;
        }
        picked.push(c);
    }
    if picked.len() < p {
        return Err(Error::TooFewPeaks { requested: p, found: picked.len() });
    }
    Ok(picked)
}
