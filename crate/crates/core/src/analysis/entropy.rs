//! Binary entropy in bits and its inverse on [0, 1/2].

use crate::error::{NppError, Result};

/// h(p) = −p log₂ p − (1−p) log₂(1−p), with h(0) = h(1) = 0.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NppError::invalid(format!("entropy argument {p} outside [0, 1]")));
    }
    Ok(h(p))
}

#[inline]
pub(crate) fn h(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// The p ∈ [0, 1/2] with h(p) = y, by bisection.
///
/// The returned point is the lower bracket end, so h(result) ≤ y always and
/// the true root lies within 10⁻¹² above it. Arguments outside [0, 1] are
/// clamped.
pub fn entropy_inverse(y: f64) -> f64 {
    if y.is_nan() || y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if h(mid) <= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - 0.4999).abs() < 1e-4);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn inverse_endpoints() {
        assert_eq!(entropy_inverse(1.0), 0.5);
        assert_eq!(entropy_inverse(0.0), 0.0);
        assert!((entropy_inverse(0.5) - 0.11).abs() < 1e-3);
    }

    #[test]
    fn inverse_round_trip() {
        for i in 0..=1000 {
            let y = i as f64 / 1000.0;
            let p = entropy_inverse(y);
            assert!((0.0..=0.5).contains(&p));
            assert!((h(p) - y).abs() <= 1e-10, "y = {y}");
        }
    }

    #[test]
    fn symmetric_and_concave() {
        let grid: Vec<f64> = (0..=2000).map(|i| i as f64 / 2000.0).collect();
        for &p in &grid {
            assert!((h(p) - h(1.0 - p)).abs() < 1e-14);
        }
        for w in grid.windows(3) {
            assert!(h(w[1]) + 1e-14 >= 0.5 * (h(w[0]) + h(w[2])));
        }
    }
}
