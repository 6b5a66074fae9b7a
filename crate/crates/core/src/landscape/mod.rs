//! Energy-landscape analysis: exhaustive near-ground-state enumeration,
//! overlap bands and witnesses, local-optimum counts, and the stability
//! experiment for the differencing heuristics.

mod enumerate;
mod ogp;
mod stability;

pub use enumerate::{
    count_local_optima, count_local_optima_capped, enumerate_below, enumerate_states,
    enumerate_states_capped, StateSet, DEFAULT_ENUM_MAX_N, DEFAULT_LOCAL_OPT_MAX_N,
};
pub use ogp::{
    check_pair_band, count_pair_band, find_mtuple, find_mtuple_with, MtupleOptions, OgpWitness,
    WitnessPair, MAX_TUPLE,
};
pub use stability::{
    predicted_threshold, stability_curve, stability_profile, ProfileRow, StabilityCurve,
    StabilityProfile,
};

pub(crate) use enumerate::gray_walk;

use crate::error::{NppError, Result};
use crate::spin::SpinConfig;
use serde::{Deserialize, Serialize};

/// Slack used when comparing a computed overlap against band endpoints.
const BAND_TOL: f64 = 1e-12;

/// ⟨a, b⟩/n, or its absolute value when `signed` is false.
pub fn overlap(a: &SpinConfig, b: &SpinConfig, signed: bool) -> Result<f64> {
    if a.len() != b.len() {
        return Err(NppError::invalid(format!(
            "overlap of configurations with {} and {} spins",
            a.len(),
            b.len()
        )));
    }
    let q = (a.len() as f64 - 2.0 * a.hamming(b) as f64) / a.len() as f64;
    Ok(if signed { q } else { q.abs() })
}

/// A closed interval of overlap values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapBand {
    pub lo: f64,
    pub hi: f64,
    /// Signed bands constrain ⟨σ,σ′⟩/n; unsigned ones its absolute value.
    pub signed: bool,
}

impl OverlapBand {
    pub fn new(lo: f64, hi: f64, signed: bool) -> Result<Self> {
        if !(-1.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(NppError::invalid(format!("overlap band [{lo}, {hi}] is not inside [-1, 1]")));
        }
        if !signed && lo < 0.0 {
            return Err(NppError::invalid("an unsigned band needs lo >= 0"));
        }
        Ok(Self { lo, hi, signed })
    }

    pub fn signed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true)
    }

    pub fn unsigned(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false)
    }

    /// Whether the signed overlap value `q` falls in the band.
    pub fn contains(&self, q: f64) -> bool {
        let v = if self.signed { q } else { q.abs() };
        v >= self.lo - BAND_TOL && v <= self.hi + BAND_TOL
    }

    /// Same test from the inner product ⟨σ,σ′⟩ of two n-spin states.
    #[inline]
    pub fn contains_inner(&self, inner: i64, n: usize) -> bool {
        self.contains(inner as f64 / n as f64)
    }

    /// Hamming distances d compatible with the signed band, as an inclusive
    /// range (possibly empty).
    pub(crate) fn signed_distance_range(&self, n: usize) -> (usize, usize) {
        debug_assert!(self.signed);
        let nf = n as f64;
        let lo = ((nf * (1.0 - self.hi) / 2.0) - 1e-9).ceil().max(0.0) as usize;
        let hi = ((nf * (1.0 - self.lo) / 2.0) + 1e-9).floor().min(nf) as usize;
        (lo, hi)
    }
}
