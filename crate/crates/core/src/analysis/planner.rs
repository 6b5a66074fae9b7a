//! Parameter planner for the stable-algorithm lower bound.
//!
//! Given (n, E_n, ε, L) it evaluates the schedule
//! g = n(E/n)^(2+ε/8), m = 2n/E, β = 1 − 2g/E, η = g/(2n), the stability
//! slack C₁ = (1/6400)(E/n)^(4+ε/4), the interpolation resolution
//! Q = 2·480²·L/η², the replica count T = 2^(2^(4mQ log₂ Q)), the overlap
//! floor ρ′ and the failure probabilities p_f = 1/(4T(Q+1)) and
//! p_st = 1/(9TQ²). T, p_f and p_st are never materialized.

use super::ogp::{main_slack, superconstant_schedule, OgpParameters};
use crate::error::{NppError, Result};
use crate::instances::step_correlation;
use crate::serde_util::{neg_inf_as_null, pos_inf_as_null};
use serde::{Deserialize, Serialize};

pub const C1: f64 = 1.0 / 6400.0;
pub const C2: f64 = 8.0 * 480.0 * 480.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub n: f64,
    pub e_n: f64,
    pub eps: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub c1: f64,
    pub c2: f64,
    pub schedule: OgpParameters,
    /// f/n.
    pub c1_slack: f64,
    /// Stability slack f = C₁·n in flips.
    pub f: f64,
    pub q: f64,
    /// log₂log₂T = 4mQ·log₂Q.
    pub log2_log2_t: f64,
    /// log₂T, null once it exceeds the f64 range.
    #[serde(with = "pos_inf_as_null")]
    pub log2_t: f64,
    /// ρ′ from its closed form 1 − (E/n)^(4+ε/4)/(c₂L).
    pub rho_prime: f64,
    /// log₂p_f = −(2 + log₂T + log₂(Q+1)); null when below the f64 range.
    #[serde(with = "neg_inf_as_null")]
    pub log2_pf: f64,
    /// log₂(−log₂p_f), always finite.
    pub log2_neg_log2_pf: f64,
    /// log₂p_st = −(log₂9 + log₂T + 2log₂Q); null when below the f64 range.
    #[serde(with = "neg_inf_as_null")]
    pub log2_pst: f64,
    /// log₂(−log₂p_st), always finite.
    pub log2_neg_log2_pst: f64,
    /// 4√C₁ + 48√(2L)/√Q.
    pub step_stability_bound: f64,
}

/// log₂(2^a + b) for a possibly huge a and moderate b ≥ 0.
fn log2_pow2_plus(a: f64, b: f64) -> f64 {
    if a > 60.0 {
        a + (b * (-a).exp2()).ln_1p() / std::f64::consts::LN_2
    } else {
        (a.exp2() + b).log2()
    }
}

pub fn plan_theorem_main(n: f64, e_n: f64, eps: f64, l: f64) -> Result<PlanReport> {
    if !(eps > 0.0 && eps < 0.2) {
        return Err(NppError::invalid(format!("planner needs eps in (0, 1/5), got {eps}")));
    }
    if !(e_n > 0.0 && e_n < n) {
        return Err(NppError::invalid(format!("planner needs 0 < E_n < n, got {e_n}")));
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(NppError::invalid(format!("planner needs L > 0, got {l}")));
    }
    let g = main_slack(n, e_n, eps);
    let schedule = superconstant_schedule(n, e_n, g)?;
    let eta = schedule.eta;
    let ratio = e_n / n;
    let c1_slack = C1 * ratio.powf(4.0 + eps / 4.0);
    let q = 2.0 * 480.0 * 480.0 * l / (eta * eta);
    let log2_q = q.log2();
    let log2_log2_t = 4.0 * schedule.m * q * log2_q;
    let log2_t = log2_log2_t.exp2();
    let rho_prime = 1.0 - ratio.powf(4.0 + eps / 4.0) / (C2 * l);
    let log2_neg_log2_pf = log2_pow2_plus(log2_log2_t, 2.0 + (q + 1.0).log2());
    let log2_neg_log2_pst = log2_pow2_plus(log2_log2_t, 9f64.log2() + 2.0 * log2_q);
    let report = PlanReport {
        n,
        e_n,
        eps,
        l,
        c1: C1,
        c2: C2,
        c1_slack,
        f: c1_slack * n,
        q,
        log2_log2_t,
        log2_t,
        rho_prime,
        log2_pf: -(2.0 + log2_t + (q + 1.0).log2()),
        log2_neg_log2_pf,
        log2_pst: -(9f64.log2() + log2_t + 2.0 * log2_q),
        log2_neg_log2_pst,
        step_stability_bound: 4.0 * c1_slack.sqrt() + 48.0 * (2.0 * l).sqrt() / q.sqrt(),
        schedule,
    };
    if !(report.rho_prime > 0.0 && report.rho_prime < 1.0 && report.q >= 1.0 && log2_log2_t.is_finite()) {
        return Err(NppError::invalid("planner produced degenerate parameters"));
    }
    Ok(report)
}

/// Ψ(x) = step correlation between τ = x/Q and τ = (x+1)/Q.
pub fn psi(x: f64, q: f64) -> Result<f64> {
    step_correlation(x / q, ((x + 1.0) / q).min(1.0))
}

/// min Ψ over 0 ≤ x ≤ Q−1 by direct evaluation: every integer when Q is
/// small enough, otherwise `max_points` evenly spaced points; the right
/// endpoint x = Q−1 is always included.
pub fn psi_min_direct(q: f64, max_points: usize) -> Result<f64> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(NppError::invalid(format!("Psi needs finite Q >= 1, got {q}")));
    }
    let top = q - 1.0;
    let mut best = psi(top, q)?;
    let count = (top.floor() as u64 + 1).min(max_points.max(2) as u64);
    let stride = if (top.floor() as u64 + 1) <= count { 1.0 } else { top / (count - 1) as f64 };
    for k in 0..count {
        let x = (k as f64 * stride).min(top);
        best = best.min(psi(x, q)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_example_is_finite_and_reproducible() {
        let a = plan_theorem_main(1e5, 2000.0, 0.1, 1.0).unwrap();
        let b = plan_theorem_main(1e5, 2000.0, 0.1, 1.0).unwrap();
        assert_eq!(a, b);
        assert!(a.log2_log2_t.is_finite());
        assert!(a.log2_neg_log2_pf.is_finite() && a.log2_neg_log2_pst.is_finite());
        let json = serde_json::to_string(&a).unwrap();
        let back: PlanReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn slack_equals_eta_squared_over_1600() {
        let r = plan_theorem_main(1e5, 2000.0, 0.1, 1.0).unwrap();
        let want = r.schedule.eta.powi(2) / 1600.0;
        assert!((r.c1_slack - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn rho_prime_matches_resolution() {
        let r = plan_theorem_main(1e5, 2000.0, 0.1, 1.0).unwrap();
        assert!((r.rho_prime - (1.0 - 1.0 / r.q)).abs() <= 1e-10 * r.rho_prime);
    }

    #[test]
    fn psi_min_small_q() {
        for q in [1.0, 2.0, 3.5, 10.0, 1000.0] {
            let got = psi_min_direct(q, 1 << 20).unwrap();
            assert!((got - (1.0 - 1.0 / q)).abs() <= 1e-12, "Q = {q}");
        }
    }

    #[test]
    fn probabilities_in_log_log_domain() {
        let r = plan_theorem_main(1e6, 1e5, 0.1, 2.0).unwrap();
        // log₂T is far beyond f64, so only the log-log forms survive.
        assert!(r.log2_t.is_infinite());
        assert!(r.log2_pf == f64::NEG_INFINITY);
        assert!((r.log2_neg_log2_pf - r.log2_log2_t).abs() < 1e-9);
        let json = serde_json::to_value(&r).unwrap();
        assert!(json["log2_t"].is_null());
    }

    #[test]
    fn log_sum_for_moderate_exponent() {
        let r = log2_pow2_plus(3.0, 5.0);
        assert!((r - 13f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(plan_theorem_main(1e5, 2000.0, 0.2, 1.0).is_err());
        assert!(plan_theorem_main(1e5, 2000.0, 0.0, 1.0).is_err());
        assert!(plan_theorem_main(1e5, 2e5, 0.1, 1.0).is_err());
        assert!(plan_theorem_main(1e5, 2000.0, 0.1, 0.0).is_err());
        // g too small for a non-void band.
        assert!(plan_theorem_main(100.0, 5.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn monotone_in_energy_exponent() {
        let es = [500.0, 1000.0, 2000.0, 4000.0, 8000.0];
        let plans: Vec<_> = es.iter().map(|&e| plan_theorem_main(1e5, e, 0.1, 1.0).unwrap()).collect();
        for w in plans.windows(2) {
            assert!(w[1].q < w[0].q);
            assert!(w[1].log2_log2_t < w[0].log2_log2_t);
        }
    }
}
