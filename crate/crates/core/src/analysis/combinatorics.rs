//! Binomial coefficients in log domain and Ramsey-number upper bounds.

use crate::error::{NppError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

/// Below this many factors the product formula is summed directly.
const DIRECT_TERMS: u64 = 32;

/// Tail of Stirling's series for ln x! beyond (x+½)ln x − x + ½ ln 2π.
fn stirling_tail(x: f64) -> f64 {
    let r = 1.0 / x;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
}

/// log₂ C(n, k).
///
/// Small min(k, n−k) sums ln((n−k+i)/i) directly. Otherwise the Stirling
/// expansions of the three factorials are differenced analytically, with
/// the leading terms arranged as k·ln(n/k) − (n−k)·ln(1 − k/n) so nothing
/// large cancels. Relative error stays near 10⁻¹⁴ up to n ~ 10¹⁸.
pub fn log2_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(NppError::invalid(format!("binomial needs k <= n, got C({n}, {k})")));
    }
    let k = k.min(n - k);
    if k == 0 {
        return Ok(0.0);
    }
    let m = n - k;
    if k <= DIRECT_TERMS {
        let ln: f64 = (1..=k).map(|i| ((m + i) as f64 / i as f64).ln()).sum();
        return Ok(ln / LN_2);
    }
    let (nf, kf, mf) = (n as f64, k as f64, m as f64);
    let lead = kf * (nf / kf).ln() - mf * (-kf / nf).ln_1p();
    let half = 0.5 * (nf / (2.0 * PI * kf * mf)).ln();
    let tail = stirling_tail(nf) - stirling_tail(kf) - stirling_tail(mf);
    Ok((lead + half + tail) / LN_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RamseyBound {
    /// R(k, l) ≤ C(k+l−2, k−1).
    TwoColor { k: u64, l: u64 },
    /// R_q(m) ≤ q^(qm) for q colors and monochromatic K_m.
    Multicolor { q: u64, m: u64 },
}

/// log₂ of the classical upper bound.
pub fn ramsey_upper(kind: RamseyBound) -> Result<f64> {
    match kind {
        RamseyBound::TwoColor { k, l } => {
            if k < 2 || l < 2 {
                return Err(NppError::invalid("two-color Ramsey bound needs k, l >= 2"));
            }
            log2_binomial(k + l - 2, k - 1)
        }
        RamseyBound::Multicolor { q, m } => {
            if q < 2 || m < 2 {
                return Err(NppError::invalid("multicolor Ramsey bound needs q, m >= 2"));
            }
            Ok((q * m) as f64 * (q as f64).log2())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};

    fn exact_log2(n: u64, k: u64) -> f64 {
        // Exact integer product, fine for the small cases used here.
        let mut c: u128 = 1;
        for i in 0..k as u128 {
            c = c * (n as u128 - i) / (i + 1);
        }
        (c as f64).log2()
    }

    #[test]
    fn small_values() {
        assert_eq!(log2_binomial(10, 0).unwrap(), 0.0);
        assert!((log2_binomial(4, 2).unwrap() - 6f64.log2()).abs() < 1e-15);
        assert!(log2_binomial(3, 4).is_err());
        for n in 0..=100u64 {
            for k in 0..=n.min(30) {
                let e = exact_log2(n, k);
                let v = log2_binomial(n, k).unwrap();
                assert!((v - e).abs() <= 1e-12 * e.max(1.0), "C({n},{k})");
            }
        }
    }

    #[test]
    fn stirling_branch_matches_exact_product() {
        for (n, k) in [(66u64, 33u64), (100, 40), (120, 60), (127, 50)] {
            let e = exact_log2(n, k);
            let v = log2_binomial(n, k).unwrap();
            assert!((v - e).abs() <= 1e-12 * e, "C({n},{k}): {v} vs {e}");
        }
    }

    #[test]
    fn branches_agree_at_the_switch() {
        // Direct sum at k = 32 against Pascal from the Stirling side.
        for n in [200u64, 10_000, 1_000_000_007] {
            let a = log2_binomial(n, 33).unwrap();
            let b = log2_binomial(n, 32).unwrap() + ((n - 32) as f64 / 33.0).log2();
            assert!((a - b).abs() <= 1e-12 * a, "n = {n}");
        }
    }

    #[test]
    fn sandwich_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let n = 2 + rng.next_u64() % 1_000_000_000;
            let k = 1 + rng.next_u64() % (n / 2);
            let v = log2_binomial(n, k).unwrap();
            let x = k as f64 * (n as f64 / k as f64).log2();
            let lower = x;
            let upper = x + k as f64 * std::f64::consts::E.log2();
            let tol = 1e-12 * v.max(1.0);
            assert!(lower <= v + tol && v <= upper + tol, "C({n},{k})");
        }
    }

    #[test]
    fn pascal_recurrence() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..5000 {
            let n = 2 + rng.next_u64() % 1_000_000;
            let k = 1 + rng.next_u64() % (n - 1);
            let a = log2_binomial(n - 1, k - 1).unwrap();
            let b = log2_binomial(n - 1, k).unwrap();
            let hi = a.max(b);
            let sum = hi + (1.0 + 2f64.powf(a.min(b) - hi)).log2();
            let v = log2_binomial(n, k).unwrap();
            assert!((v - sum).abs() <= 1e-9 * v.max(1.0), "C({n},{k})");
        }
    }

    #[test]
    fn ramsey_bounds() {
        assert_eq!(ramsey_upper(RamseyBound::TwoColor { k: 2, l: 2 }).unwrap(), 1.0);
        let v = ramsey_upper(RamseyBound::Multicolor { q: 3, m: 4 }).unwrap();
        assert!((v - 12.0 * 3f64.log2()).abs() < 1e-12);
        for m in 2..=30 {
            let v = ramsey_upper(RamseyBound::TwoColor { k: m, l: m }).unwrap();
            assert!(v <= (2 * m - 2) as f64 + 1e-12);
        }
        assert!(ramsey_upper(RamseyBound::TwoColor { k: 1, l: 3 }).is_err());
    }
}
