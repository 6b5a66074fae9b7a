//! Overlap-gap moment exponents and parameter schedules.

use super::entropy::{entropy_inverse, h};
use crate::error::{NppError, Result};
use serde::{Deserialize, Serialize};

/// 1 + (m−1)·h((1−β+η)/2) − εm, in bits per n. Negative values certify the
/// first-moment condition for the m-tuple overlap gap.
pub fn first_moment_exponent(eps: f64, m: f64, beta: f64, eta: f64) -> Result<f64> {
    if !(0.0 < eta && eta < beta && beta < 1.0) {
        return Err(NppError::invalid(format!("need 0 < eta < beta < 1, got eta {eta}, beta {beta}")));
    }
    if m < 2.0 || !(eps > 0.0 && eps <= 1.0) {
        return Err(NppError::invalid(format!("need m >= 2 and eps in (0, 1], got m {m}, eps {eps}")));
    }
    Ok(1.0 + (m - 1.0) * h((1.0 - beta + eta) / 2.0) - eps * m)
}

/// Left end of the forbidden pair band: the smallest ρ with
/// 1 + h((1−ρ)/2) − 2ε ≤ 0, namely 1 − 2h⁻¹(2ε − 1).
pub fn two_ogp_rho(eps: f64) -> Result<f64> {
    if !(eps > 0.5 && eps <= 1.0) {
        return Err(NppError::invalid(format!("pair band needs eps in (1/2, 1], got {eps}")));
    }
    Ok(1.0 - 2.0 * entropy_inverse(2.0 * eps - 1.0))
}

/// The slack g = n·(E/n)^(2+ε/8) used by the stability planner, evaluated
/// in log domain.
pub fn main_slack(n: f64, e_n: f64, eps: f64) -> f64 {
    (n.ln() + (2.0 + eps / 8.0) * (e_n / n).ln()).exp()
}

/// Super-constant m-tuple schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OgpParameters {
    pub n: f64,
    pub e_n: f64,
    /// m = 2n/E, possibly fractional.
    pub m: f64,
    /// ⌈m⌉, the tuple size actually used.
    pub m_tuple: u64,
    pub beta: f64,
    pub eta: f64,
    pub g_n: f64,
    pub nu_n: f64,
    /// g·n·log₂n / E², should be small for the o(E²/(n log n)) condition.
    pub growth_ratio: f64,
    pub warnings: Vec<String>,
}

/// m = 2n/E, β = 1 − 2g/E, η = g/(2n), ν = g/E.
///
/// Range violations are errors. The asymptotic growth conditions on g can
/// only be reported at a single n, so they produce warnings.
pub fn superconstant_schedule(n: f64, e_n: f64, g_n: f64) -> Result<OgpParameters> {
    if !(e_n > 0.0 && e_n < n) {
        return Err(NppError::invalid(format!("need 0 < E_n < n, got E_n {e_n}, n {n}")));
    }
    if !(g_n > 0.0 && g_n < e_n / 2.0) {
        return Err(NppError::invalid(format!("need 0 < g < E_n/2, got g {g_n}")));
    }
    let m = 2.0 * n / e_n;
    let beta = 1.0 - 2.0 * g_n / e_n;
    let eta = g_n / (2.0 * n);
    if !(eta < beta) {
        return Err(NppError::invalid(format!("band is inverted: eta {eta} >= beta {beta}")));
    }
    if n * eta < 1.0 {
        return Err(NppError::invalid(format!(
            "band holds no lattice point: n*eta = {} < 1",
            n * eta
        )));
    }
    let growth_ratio = g_n * n * n.log2() / (e_n * e_n);
    let mut warnings = Vec::new();
    if g_n < n.log2().max(1.0) {
        warnings.push(format!("g = {g_n} is small against log2 n; the g -> infinity condition is weak here"));
    }
    if growth_ratio >= 1.0 {
        warnings.push(format!(
            "g*n*log2(n)/E^2 = {growth_ratio} >= 1; the g = o(E^2/(n log n)) condition fails here"
        ));
    }
    Ok(OgpParameters {
        n,
        e_n,
        m,
        m_tuple: m.ceil() as u64,
        beta,
        eta,
        g_n,
        nu_n: g_n / e_n,
        growth_ratio,
        warnings,
    })
}
