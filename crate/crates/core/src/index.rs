//! Index arithmetic on the periodic delay-Doppler grid.

/// Maps a Doppler row `k_row` in `[0, N-1]` to the signed range `[ceil(-N/2), ceil(N/2)-1]`.
///
/// Rows outside `[0, N-1]` are wrapped first.
pub fn signed_doppler(k_row: i64, n: usize) -> i64 {
    let n = n as i64;
    let k = k_row.rem_euclid(n);
    let upper = (n + 1) / 2; // ceil(N/2)
    if k < upper {
        k
    } else {
        k - n
    }
}

/// Inverse of [`signed_doppler`]: any signed index back to its row in `[0, N-1]`.
pub fn doppler_row(k_signed: i64, n: usize) -> usize {
    k_signed.rem_euclid(n as i64) as usize
}

/// `[i]_n`
pub fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

/// Shortest signed distance between two real indices on a ring of `n` bins.
pub fn circular_diff(a: f64, b: f64, n: usize) -> f64 {
    let n = n as f64;
    let d = (a - b).rem_euclid(n);
    if d >= n / 2.0 {
        d - n
    } else {
        d
    }
}
