//! Truth-to-estimate matching.

use ddsense::index::circular_diff;
use ddsense::{FrameConfig, TargetEstimate};
use itertools::Itertools;

use crate::config::{TargetTruth, MAX_TARGETS};
use crate::error::{Error, Result};

/// Circular delay and Doppler error of an estimate, in grid units.
pub fn index_errors(truth: &TargetTruth, est: &TargetEstimate, cfg: &FrameConfig) -> (f64, f64) {
    (
        circular_diff(est.l_tau_hat, truth.l_tau, cfg.m()),
        circular_diff(est.k_nu_hat, truth.k_nu, cfg.n()),
    )
}

fn cost(truth: &TargetTruth, est: &TargetEstimate, cfg: &FrameConfig) -> f64 {
    let (dl, dk) = index_errors(truth, est, cfg);
    (dl / cfg.m() as f64).powi(2) + (dk / cfg.n() as f64).powi(2)
}

/// Minimum total cost bijection; `pairing[i]` is the estimate matched to truth `i`.
///
/// The search is exhaustive over all `P!` orderings. Ties keep the first
/// ordering in lexicographic order.
pub fn associate(truth: &[TargetTruth], estimates: &[TargetEstimate], cfg: &FrameConfig) -> Result<Vec<usize>> {
    if truth.len() != estimates.len() {
        return Err(Error::AssociationLength { truth: truth.len(), estimates: estimates.len() });
    }
    if truth.len() > MAX_TARGETS {
        return Err(Error::TooManyTargets { limit: MAX_TARGETS, found: truth.len() });
    }
    let p = truth.len();
    let table: Vec<Vec<f64>> = truth
        .iter()
        .map(|t| estimates.iter().map(|e| cost(t, e, cfg)).collect())
        .collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (0..p).permutations(p) {
        let total: f64 = perm.iter().enumerate().map(|(i, &j)| table[i][j]).sum();
        if best.as_ref().is_none_or(|(b, _)| total < *b) {
            best = Some((total, perm));
        }
    }
    Ok(best.map(|(_, p)| p).unwrap_or_default())
}
