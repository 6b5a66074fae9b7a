//! Partition solvers and the energy functional.
//!
//! Every solver returns an [`EnergyRecord`]; the discrepancy |⟨σ, X⟩| is
//! carried both raw and normalized by √n.

mod differencing;
mod exact;
mod greedy;

pub use differencing::{solve_ldm, solve_pdm};
pub use exact::{solve_exact, solve_exact_capped, DEFAULT_EXACT_MAX_N};
pub use greedy::solve_greedy;

use crate::error::{NppError, Result};
use crate::instances::{Instance, Weights};
use crate::spin::SpinConfig;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

/// Arithmetic shared by the float and exact-integer code paths.
pub(crate) trait Scalar:
    Copy + PartialEq + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> + fmt::Debug
{
    const ZERO: Self;
    fn abs(self) -> Self;
    fn cmp_total(&self, other: &Self) -> Ordering;
    fn to_f64(self) -> f64;
    fn double(self) -> Self {
        self + self
    }
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl Scalar for i128 {
    const ZERO: Self = 0;
    fn abs(self) -> Self {
        i128::abs(self)
    }
    fn cmp_total(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

#[inline]
pub(crate) fn signed_sum<T: Scalar>(w: &[T], sigma: &SpinConfig) -> T {
    w.iter().enumerate().fold(T::ZERO, |acc, (i, &x)| {
        if sigma.is_plus(i) {
            acc + x
        } else {
            acc - x
        }
    })
}

/// σ together with its discrepancy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub sigma: SpinConfig,
    /// |⟨σ, X⟩| in weight units.
    pub raw: f64,
    /// raw / √n.
    pub normalized: f64,
    /// −∞ (serialized as null) for a perfect partition.
    #[serde(with = "crate::serde_util::neg_inf_as_null")]
    pub log2_normalized: f64,
    /// Exact |⟨σ, X⟩| at scale 2^(−bits) in quantized mode.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "opt_i128_string"
    )]
    pub raw_exact: Option<i128>,
}

mod opt_i128_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<i128>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_str(&x.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<i128>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|t| t.parse().map_err(serde::de::Error::custom))
            .transpose()
    }
}

impl EnergyRecord {
    pub(crate) fn from_float(sigma: SpinConfig, raw: f64) -> Self {
        let normalized = raw / (sigma.len() as f64).sqrt();
        Self {
            sigma,
            raw,
            normalized,
            log2_normalized: normalized.log2(),
            raw_exact: None,
        }
    }

    pub(crate) fn from_int(sigma: SpinConfig, raw: i128, bits: u32) -> Self {
        debug_assert!(raw >= 0);
        let mut rec = Self::from_float(sigma, int_to_weight_units(raw, bits));
        rec.raw_exact = Some(raw);
        rec
    }
}

/// Exact integer at scale 2^(−bits) converted to weight units (one rounding).
#[inline]
pub(crate) fn int_to_weight_units(v: i128, bits: u32) -> f64 {
    v as f64 * 2f64.powi(-(bits as i32))
}

fn check_len(x: &Instance, sigma: &SpinConfig) -> Result<()> {
    if x.n() != sigma.len() {
        return Err(NppError::invalid(format!(
            "spin configuration has {} entries, instance has {}",
            sigma.len(),
            x.n()
        )));
    }
    Ok(())
}

/// |Σ σ_i X_i| in the instance's arithmetic mode.
pub fn energy(x: &Instance, sigma: &SpinConfig) -> Result<EnergyRecord> {
    check_len(x, sigma)?;
    Ok(match x.view() {
        Weights::Float(w) => EnergyRecord::from_float(sigma.clone(), signed_sum(w, sigma).abs()),
        Weights::Int { values, bits } => {
            EnergyRecord::from_int(sigma.clone(), signed_sum(values, sigma).abs(), bits)
        }
    })
}

fn local_optimum_in<T: Scalar>(w: &[T], sigma: &SpinConfig) -> bool {
    let s = signed_sum(w, sigma);
    let current = s.abs();
    (0..w.len()).all(|i| {
        let moved = if sigma.is_plus(i) {
            s - w[i].double()
        } else {
            s + w[i].double()
        };
        moved.abs().cmp_total(&current) != Ordering::Less
    })
}

/// True iff no single spin flip strictly decreases |⟨σ, X⟩|.
pub fn is_local_optimum(x: &Instance, sigma: &SpinConfig) -> Result<bool> {
    check_len(x, sigma)?;
    Ok(match x.view() {
        Weights::Float(w) => local_optimum_in(w, sigma),
        Weights::Int { values, .. } => local_optimum_in(values, sigma),
    })
}

/// Named solver, used by experiment drivers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Exact,
    Ldm,
    Pdm,
    Greedy,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Exact => "exact",
            Algorithm::Ldm => "ldm",
            Algorithm::Pdm => "pdm",
            Algorithm::Greedy => "greedy",
        })
    }
}

impl FromStr for Algorithm {
    type Err = NppError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Algorithm::Exact),
            "ldm" => Ok(Algorithm::Ldm),
            "pdm" => Ok(Algorithm::Pdm),
            "greedy" => Ok(Algorithm::Greedy),
            _ => Err(NppError::invalid(format!("unknown algorithm {s:?}"))),
        }
    }
}

impl Algorithm {
    /// Greedy starts from all-plus and scans with `rng_seed`.
    pub fn run(self, x: &Instance, rng_seed: u64) -> Result<EnergyRecord> {
        match self {
            Algorithm::Exact => solve_exact(x),
            Algorithm::Ldm => solve_ldm(x),
            Algorithm::Pdm => solve_pdm(x),
            Algorithm::Greedy => solve_greedy(x, &SpinConfig::all_plus(x.n()), rng_seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Mode;

    fn inst(w: &[f64]) -> Instance {
        Instance::from_weights(w.to_vec(), Mode::Float64).unwrap()
    }

    #[test]
    fn perfect_partition_has_zero_energy() {
        let x = inst(&[8.0, 7.0, 6.0, 5.0, 4.0]);
        let s = SpinConfig::from_signs(&[1, 1, -1, -1, -1]).unwrap();
        assert_eq!(energy(&x, &s).unwrap().raw, 0.0);
    }

    #[test]
    fn two_item_energy() {
        let x = inst(&[3.0, 1.0]);
        let r = energy(&x, &SpinConfig::from_signs(&[1, -1]).unwrap()).unwrap();
        assert_eq!(r.raw, 2.0);
        assert_eq!(r.normalized, 2.0 / 2f64.sqrt());
    }

    #[test]
    fn negated_sigma_gives_identical_record_values() {
        let x = Instance::generate(33, 5, Mode::quantized_default()).unwrap();
        let s = SpinConfig::from_mask(33, 0x1_2345_6789);
        let a = energy(&x, &s).unwrap();
        let b = energy(&x, &s.negated()).unwrap();
        assert_eq!((a.raw, a.normalized, a.raw_exact), (b.raw, b.normalized, b.raw_exact));
    }

    #[test]
    fn energy_length_mismatch() {
        let x = inst(&[1.0, 2.0]);
        assert!(energy(&x, &SpinConfig::all_plus(3)).is_err());
        assert!(is_local_optimum(&x, &SpinConfig::all_plus(3)).is_err());
    }

    #[test]
    fn quantized_normalized_matches_integer_raw() {
        let x = Instance::generate(20, 3, Mode::quantized_default()).unwrap();
        let r = energy(&x, &SpinConfig::all_plus(20)).unwrap();
        let exact = r.raw_exact.unwrap();
        assert_eq!(r.raw, exact as f64 / 2f64.powi(50));
        assert_eq!(r.normalized, r.raw / 20f64.sqrt());
    }

    #[test]
    fn local_optimum_examples() {
        let x = inst(&[1.0, 2.0, 4.0]);
        assert!(is_local_optimum(&x, &SpinConfig::from_signs(&[1, 1, -1]).unwrap()).unwrap());
        assert!(!is_local_optimum(&x, &SpinConfig::from_signs(&[1, -1, 1]).unwrap()).unwrap());
    }

    #[test]
    fn energy_record_json_roundtrip() {
        let x = Instance::generate(9, 1, Mode::quantized_default()).unwrap();
        let r = energy(&x, &SpinConfig::from_mask(9, 0b1_0110_1101)).unwrap();
        let back: EnergyRecord = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
