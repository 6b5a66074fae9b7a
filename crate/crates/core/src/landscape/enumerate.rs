//! Gray-code enumeration of the 2^(n−1) canonical states.

use crate::error::{guard, Result};
use crate::instances::{Instance, Weights};
use crate::solvers::{energy, is_local_optimum, Scalar};
use crate::spin::SpinConfig;
use serde::{Deserialize, Serialize};

pub const DEFAULT_ENUM_MAX_N: usize = 28;
pub const DEFAULT_LOCAL_OPT_MAX_N: usize = 26;

/// Visit every canonical mask (bit 0 set) with its signed sum, in Gray-code
/// order starting from all-plus. Step k flips item 1 + tz(k), so each visit
/// costs one addition.
pub(crate) fn gray_walk<T: Scalar>(w: &[T], mut visit: impl FnMut(u64, T)) {
    let n = w.len();
    debug_assert!((1..=64).contains(&n));
    let mut mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut sum = w.iter().fold(T::ZERO, |a, &x| a + x);
    visit(mask, sum);
    let total: u64 = 1u64 << (n - 1);
    for k in 1..total {
        let i = 1 + k.trailing_zeros() as usize;
        let bit = 1u64 << i;
        mask ^= bit;
        let d = w[i].double();
        sum = if mask & bit != 0 { sum + d } else { sum - d };
        visit(mask, sum);
    }
}

/// Canonical states whose normalized energy is at most `threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSet {
    pub n: usize,
    /// Normalized-energy cutoff.
    #[serde(with = "crate::serde_util::pos_inf_as_null")]
    pub threshold: f64,
    /// Interpolation parameter of the instance the set came from.
    pub tau: f64,
    pub exhaustive: bool,
    /// Sorted by mask; all canonical.
    pub states: Vec<SpinConfig>,
    /// Normalized energy of each state.
    pub energies: Vec<f64>,
}

impl StateSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

/// Loose raw-sum acceptance bound: every state whose fresh energy passes the
/// exact test also passes this one, whatever rounding the running sum saw.
fn loose_raw_bound(x: &Instance, threshold: f64) -> f64 {
    let scale: f64 = x.weights().iter().map(|w| w.abs()).sum();
    threshold * (x.n() as f64).sqrt() * (1.0 + 1e-9) + 1e-12 * scale
}

/// Masks whose running |sum| (in weight units) is within `bound`.
fn candidates(x: &Instance, bound: f64, mut hit: impl FnMut(u64)) {
    match x.view() {
        Weights::Float(w) => gray_walk(w, |m, s| {
            if s.abs() <= bound {
                hit(m)
            }
        }),
        Weights::Int { values, bits } => {
            let unit = 2f64.powi(-(bits as i32));
            gray_walk(values, |m, s| {
                if (s.abs() as f64) * unit <= bound {
                    hit(m)
                }
            })
        }
    }
}

/// All canonical σ with normalized energy ≤ 2^(−E_n).
pub fn enumerate_states(x: &Instance, e_n: f64) -> Result<StateSet> {
    enumerate_states_capped(x, e_n, DEFAULT_ENUM_MAX_N)
}

pub fn enumerate_states_capped(x: &Instance, e_n: f64, max_n: usize) -> Result<StateSet> {
    enumerate_below(x, (-e_n).exp2(), max_n)
}

/// All canonical σ with normalized energy ≤ `threshold`. Each candidate from
/// the incremental walk is confirmed with a fresh `energy` evaluation, so the
/// result equals the naive per-state filter exactly.
pub fn enumerate_below(x: &Instance, threshold: f64, max_n: usize) -> Result<StateSet> {
    guard("enumerate_states", x.n(), max_n.min(64))?;
    let n = x.n();
    let mut hits = Vec::new();
    candidates(x, loose_raw_bound(x, threshold), |m| hits.push(m));
    hits.sort_unstable();
    let mut states = Vec::new();
    let mut energies = Vec::new();
    for m in hits {
        let s = SpinConfig::from_mask(n, m);
        let e = energy(x, &s)?.normalized;
        if e <= threshold {
            states.push(s);
            energies.push(e);
        }
    }
    Ok(StateSet {
        n,
        threshold,
        tau: 0.0,
        exhaustive: true,
        states,
        energies,
    })
}

/// Number of σ ∈ {−1,+1}ⁿ, both signs counted, that are single-flip local
/// optima with normalized energy ≤ 2^(−E_n).
pub fn count_local_optima(x: &Instance, e_n: f64) -> Result<u64> {
    count_local_optima_capped(x, e_n, DEFAULT_LOCAL_OPT_MAX_N)
}

pub fn count_local_optima_capped(x: &Instance, e_n: f64, max_n: usize) -> Result<u64> {
    guard("count_local_optima", x.n(), max_n.min(64))?;
    let threshold = (-e_n).exp2();
    let n = x.n();
    let mut hits = Vec::new();
    candidates(x, loose_raw_bound(x, threshold), |m| hits.push(m));
    let mut count = 0u64;
    for m in hits {
        let s = SpinConfig::from_mask(n, m);
        if energy(x, &s)?.normalized <= threshold && is_local_optimum(x, &s)? {
            count += 2;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::NppError;
    use crate::instances::Mode;
    use crate::solvers::solve_exact;

    fn naive(x: &Instance, threshold: f64) -> Vec<SpinConfig> {
        let n = x.n();
        (0..(1u64 << (n - 1)))
            .map(|r| SpinConfig::from_mask(n, 1 | (r << 1)))
            .filter(|s| energy(x, s).unwrap().normalized <= threshold)
            .collect()
    }

    #[test]
    fn gray_walk_visits_every_canonical_state_once() {
        let x = Instance::generate(10, 1, Mode::quantized_default()).unwrap();
        let q = x.quantized_weights().unwrap();
        let mut seen = std::collections::HashSet::new();
        gray_walk(q, |m, s| {
            assert_eq!(m & 1, 1);
            let fresh = crate::solvers::signed_sum(q, &SpinConfig::from_mask(10, m));
            assert_eq!(s, fresh);
            assert!(seen.insert(m));
        });
        assert_eq!(seen.len(), 512);
    }

    #[test]
    fn matches_naive_filter() {
        for seed in 0..10 {
            for mode in [Mode::quantized_default(), Mode::Float64] {
                let x = Instance::generate(16, seed, mode).unwrap();
                for e_n in [2.0, 4.0, 6.0] {
                    let s = enumerate_states(&x, e_n).unwrap();
                    assert_eq!(s.states, naive(&x, (-e_n).exp2()), "seed {seed}");
                    assert!(s.states.iter().all(SpinConfig::is_canonical));
                }
            }
        }
    }

    #[test]
    fn vacuous_and_empty_thresholds() {
        let x = Instance::generate(12, 3, Mode::quantized_default()).unwrap();
        let all: f64 = x.weights().iter().map(|w| w.abs()).sum::<f64>() / 12f64.sqrt();
        let s = enumerate_states(&x, -(all.log2() + 1.0)).unwrap();
        assert_eq!(s.len(), 1 << 11);
        let opt = solve_exact(&x).unwrap().normalized;
        let s = enumerate_below(&x, opt * 0.5, DEFAULT_ENUM_MAX_N).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn guard_refuses() {
        let x = Instance::generate(29, 3, Mode::Float64).unwrap();
        assert!(matches!(enumerate_states(&x, 10.0), Err(NppError::ResourceLimit { .. })));
        let x = Instance::generate(27, 3, Mode::Float64).unwrap();
        assert!(matches!(count_local_optima(&x, 10.0), Err(NppError::ResourceLimit { .. })));
    }

    #[test]
    fn local_optima_small_example() {
        let x = Instance::from_weights(vec![1.0, 2.0, 4.0], Mode::Float64).unwrap();
        assert_eq!(count_local_optima(&x, -10.0).unwrap(), 2);
        assert_eq!(count_local_optima(&x, 10.0).unwrap(), 0);
    }

    #[test]
    fn local_optima_matches_brute_force_and_is_even() {
        for seed in 0..10 {
            let x = Instance::generate(12, seed, Mode::quantized_default()).unwrap();
            let mut brute = 0;
            for m in 0..(1u64 << 12) {
                let s = SpinConfig::from_mask(12, m);
                if is_local_optimum(&x, &s).unwrap() {
                    brute += 1;
                }
            }
            let c = count_local_optima(&x, -100.0).unwrap();
            assert_eq!(c, brute);
            assert_eq!(c % 2, 0);
        }
    }
}
