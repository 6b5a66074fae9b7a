//! Exact optimum by meet-in-the-middle.
//!
//! Item 0 is pinned to +1 (every ± class has such a representative). The
//! first ⌈n/2⌉ items produce 2^(⌈n/2⌉−1) signed sums, the rest produce
//! 2^(⌊n/2⌋); both lists are sorted and a two-pointer sweep finds the pair
//! whose total is closest to zero. Among all minimizers the lexicographically
//! smallest canonical configuration is returned.

use super::{energy, EnergyRecord, Scalar};
use crate::error::{guard, Result};
use crate::instances::{Instance, Weights};
use crate::spin::SpinConfig;
use std::cmp::Ordering;

pub const DEFAULT_EXACT_MAX_N: usize = 44;
const HARD_MAX_N: usize = 64;

pub fn solve_exact(x: &Instance) -> Result<EnergyRecord> {
    solve_exact_capped(x, DEFAULT_EXACT_MAX_N)
}

/// `solve_exact` with an explicit size guard (never above 64).
pub fn solve_exact_capped(x: &Instance, max_n: usize) -> Result<EnergyRecord> {
    guard("solve_exact", x.n(), max_n.min(HARD_MAX_N))?;
    let mask = match x.view() {
        Weights::Float(w) => argmin_mask(w),
        Weights::Int { values, .. } => argmin_mask(values),
    };
    energy(x, &SpinConfig::from_mask(x.n(), mask))
}

/// All signed sums of `w[range]` as (sum, mask-over-global-indices). The
/// first item of the range is fixed to + when `pin_first`.
fn half_sums<T: Scalar>(w: &[T], lo: usize, hi: usize, pin_first: bool) -> Vec<(T, u64)> {
    let mut out = Vec::with_capacity(1usize << (hi - lo));
    let mut start = lo;
    if pin_first && lo < hi {
        out.push((w[lo], 1u64 << lo));
        start += 1;
    } else {
        out.push((T::ZERO, 0));
    }
    for i in start..hi {
        let bit = 1u64 << i;
        let len = out.len();
        for k in 0..len {
            let (s, m) = out[k];
            out.push((s + w[i], m | bit));
            out[k] = (s - w[i], m);
        }
    }
    out
}

fn lex_less(n: usize, a: u64, b: u64) -> bool {
    SpinConfig::from_mask(n, a).lex_cmp(&SpinConfig::from_mask(n, b)) == Ordering::Less
}

pub(crate) fn argmin_mask<T: Scalar>(w: &[T]) -> u64 {
    let n = w.len();
    let split = n.div_ceil(2);
    let mut left = half_sums(w, 0, split, true);
    let mut right = half_sums(w, split, n, false);
    left.sort_by(|a, b| a.0.cmp_total(&b.0).then(a.1.cmp(&b.1)));
    right.sort_by(|a, b| a.0.cmp_total(&b.0).then(a.1.cmp(&b.1)));

    // Two-pointer sweep for min |a + b|.
    let mut best = (left[0].0 + right[0].0).abs();
    let (mut i, mut j) = (0usize, right.len() - 1);
    loop {
        let s = left[i].0 + right[j].0;
        if s.abs().cmp_total(&best) == Ordering::Less {
            best = s.abs();
        }
        if s.cmp_total(&T::ZERO) == Ordering::Greater {
            if j == 0 {
                break;
            }
            j -= 1;
        } else {
            i += 1;
            if i == left.len() {
                break;
            }
        }
    }

    // Every (a, b) attaining `best`; keep the lexicographically smallest.
    let mut chosen: Option<u64> = None;
    for &(a, lm) in &left {
        let p = right.partition_point(|r| (a + r.0).cmp_total(&T::ZERO) == Ordering::Less);
        let mut consider = |rm: u64| {
            let m = lm | rm;
            if chosen.is_none_or(|c| lex_less(n, m, c)) {
                chosen = Some(m);
            }
        };
        let mut k = p;
        while k > 0 && (a + right[k - 1].0).abs() == best {
            consider(right[k - 1].1);
            k -= 1;
        }
        let mut k = p;
        while k < right.len() && (a + right[k].0).abs() == best {
            consider(right[k].1);
            k += 1;
        }
    }
    chosen.expect("the swept minimum is attained")
}
