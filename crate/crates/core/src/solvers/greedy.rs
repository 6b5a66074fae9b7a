//! Single-flip local search.

use super::{energy, Scalar, EnergyRecord};
use crate::error::{NppError, Result};
use crate::instances::{Instance, Weights};
use crate::rng::NormalStream;
use crate::spin::SpinConfig;
use std::cmp::Ordering;

fn descend<T: Scalar>(w: &[T], sigma: &mut SpinConfig, rng: &mut NormalStream) {
    let n = w.len();
    let mut order: Vec<usize> = (0..n).collect();
    loop {
        rng.shuffle(&mut order);
        // Fresh sum each sweep so the final check sees the same value as
        // `is_local_optimum`.
        let mut s = super::signed_sum(w, sigma);
        let mut improved = false;
        for &i in &order {
            let moved = if sigma.is_plus(i) { s - w[i].double() } else { s + w[i].double() };
            if moved.abs().cmp_total(&s.abs()) == Ordering::Less {
                sigma.flip(i);
                s = moved;
                improved = true;
            }
        }
        if !improved {
            return;
        }
    }
}

/// First-improvement descent from `start`. Each sweep visits the coordinates
/// in a fresh random order drawn from `rng_seed`; the search stops after a
/// sweep with no strictly improving flip, so the result is a local optimum.
pub fn solve_greedy(x: &Instance, start: &SpinConfig, rng_seed: u64) -> Result<EnergyRecord> {
    if start.len() != x.n() {
        return Err(NppError::invalid(format!(
            "start has {} spins, instance has {}",
            start.len(),
            x.n()
        )));
    }
    let mut sigma = start.clone();
    let mut rng = NormalStream::new(rng_seed);
    match x.view() {
        Weights::Float(w) => descend(w, &mut sigma, &mut rng),
        Weights::Int { values, .. } => descend(values, &mut sigma, &mut rng),
    }
    energy(x, &sigma)
}
