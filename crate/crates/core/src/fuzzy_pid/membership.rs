//! Strict triangular partitions.
//!
//! Each set peaks at its anchor and falls linearly to zero at the neighbouring
//! anchors. The first set is a left shoulder and the last a right shoulder,
//! so the degrees sum to one everywhere on the real line.

use crate::error::{domain, Result};

/// Checks that anchors are finite and strictly increasing.
pub fn validate_peaks(peaks: &[f64]) -> Result<()> {
    if peaks.len() < 2 {
        return Err(domain("a partition needs at least two sets"));
    }
    if peaks.iter().any(|p| !p.is_finite()) {
        return Err(domain("partition anchors must be finite"));
    }
    if peaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain(format!(
            "partition anchors must be strictly increasing: {peaks:?}"
        )));
    }
    Ok(())
}

/// Membership of `x` in every set of the partition anchored at `peaks`.
///
/// At most two neighbouring entries are nonzero.
pub fn degrees<const N: usize>(peaks: &[f64; N], x: f64) -> [f64; N] {
    let mut out = [0.0; N];
    if x <= peaks[0] {
        out[0] = 1.0;
        return out;
    }
    if x >= peaks[N - 1] {
        out[N - 1] = 1.0;
        return out;
    }
    // peaks[k] <= x < peaks[k + 1]
    let k = peaks.partition_point(|&c| c <= x) - 1;
    let right = (x - peaks[k]) / (peaks[k + 1] - peaks[k]);
    out[k] = 1.0 - right;
    out[k + 1] = right;
    out
}

/// Membership of `x` in set `k` alone.
pub fn degree<const N: usize>(peaks: &[f64; N], k: usize, x: f64) -> f64 {
    degrees(peaks, x)[k]
}

#[cfg(test)]
mod tests {
    use super::*;

    const PEAKS: [f64; 3] = [3.0, 6.0, 9.0];

    #[test]
    fn shoulders_saturate() {
        assert_eq!(degrees(&PEAKS, 0.0), [1.0, 0.0, 0.0]);
        assert_eq!(degrees(&PEAKS, 3.0), [1.0, 0.0, 0.0]);
        assert_eq!(degrees(&PEAKS, 9.0), [0.0, 0.0, 1.0]);
        assert_eq!(degrees(&PEAKS, 40.0), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn peaks_are_crisp() {
        assert_eq!(degrees(&PEAKS, 6.0), [0.0, 1.0, 0.0]);
    }

    #[test]
    fn linear_between_peaks() {
        let d = degrees(&PEAKS, 4.5);
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15);
        let d = degrees(&PEAKS, 8.0);
        assert!((d[1] - 1.0 / 3.0).abs() < 1e-15 && (d[2] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(degree(&PEAKS, 2, 8.0), d[2]);
    }

    #[test]
    fn rejects_unsorted_anchors() {
        assert!(validate_peaks(&[1.0, 1.0, 2.0]).is_err());
        assert!(validate_peaks(&[1.0]).is_err());
        assert!(validate_peaks(&[0.0, f64::NAN]).is_err());
        assert!(validate_peaks(&[0.2, 0.5, 0.8, 1.2, 1.8]).is_ok());
    }
}
