//! Overlap between heuristic outputs on correlated instance pairs.
//!
//! For each grid value ρ the correlation parameter is τ = 2^(−ρ). A trial
//! draws independent X, X′, forms Y = √(1−τ²)X + τX′ and runs the algorithm
//! on both. Trial seeds are derived from (master seed, grid index, trial
//! index), so results do not depend on the worker count.

use super::overlap;
use crate::error::{NppError, Result};
use crate::instances::{interpolate_pair, Instance, Mode};
use crate::rng::seed_stream;
use crate::solvers::Algorithm;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// α(ln n)²/ln 2 with α = 1/(2 ln 2): the ρ at which the differencing
/// discrepancy scale 2^(−α(ln n)²/ln 2) matches the perturbation size τ.
pub fn predicted_threshold(n: usize) -> f64 {
    let alpha = 1.0 / (2.0 * LN_2);
    alpha * (n as f64).ln().powi(2) / LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCurve {
    pub n: usize,
    pub algo: Algorithm,
    pub master_seed: u64,
    pub rho_grid: Vec<f64>,
    pub tau: Vec<f64>,
    pub mean_overlap: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: usize,
    pub predicted_threshold: f64,
}

impl StabilityCurve {
    /// First grid ρ whose mean overlap is at least `level`.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        self.rho_grid
            .iter()
            .zip(&self.mean_overlap)
            .find(|(_, &m)| m >= level)
            .map(|(&r, _)| r)
    }
}

struct Trial {
    x: Instance,
    y: Instance,
    rng_seed: u64,
}

fn check_grid(n: usize, rho_grid: &[f64], trials: usize) -> Result<()> {
    if n == 0 {
        return Err(NppError::invalid("n must be at least 1"));
    }
    if rho_grid.is_empty() || trials == 0 {
        return Err(NppError::invalid("need a nonempty rho grid and at least one trial"));
    }
    if rho_grid.iter().any(|r| r.is_nan() || *r < 0.0) {
        return Err(NppError::invalid("rho values must be >= 0 (tau = 2^-rho <= 1)"));
    }
    if rho_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NppError::invalid("rho grid must be strictly increasing"));
    }
    Ok(())
}

fn trial(n: usize, master: u64, r: usize, t: usize, tau: f64) -> Result<Trial> {
    let s = seed_stream(seed_stream(master, r as u64), t as u64);
    let x = Instance::generate(n, seed_stream(s, 0), Mode::Float64)?;
    let x2 = Instance::generate(n, seed_stream(s, 1), Mode::Float64)?;
    let y = interpolate_pair(&x, &x2, tau)?;
    Ok(Trial {
        x,
        y,
        rng_seed: seed_stream(s, 2),
    })
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Run `f` on every (grid index, trial) pair in parallel; results come back
/// ordered by grid index, then trial index.
fn run_grid<T: Send>(
    n: usize,
    rho_grid: &[f64],
    trials: usize,
    master: u64,
    f: impl Fn(&Trial) -> Result<T> + Sync,
) -> Result<Vec<Vec<T>>> {
    rho_grid
        .iter()
        .enumerate()
        .map(|(r, &rho)| {
            let tau = (-rho).exp2();
            (0..trials)
                .into_par_iter()
                .map(|t| trial(n, master, r, t, tau).and_then(|tr| f(&tr)))
                .collect::<Result<Vec<T>>>()
        })
        .collect()
}

pub fn stability_curve(
    n: usize,
    rho_grid: &[f64],
    trials: usize,
    algo: Algorithm,
    master_seed: u64,
) -> Result<StabilityCurve> {
    check_grid(n, rho_grid, trials)?;
    let per = run_grid(n, rho_grid, trials, master_seed, |tr| {
        let a = algo.run(&tr.x, tr.rng_seed)?;
        let b = algo.run(&tr.y, tr.rng_seed)?;
        overlap(&a.sigma, &b.sigma, true)
    })?;
    let (mean_overlap, stderr) = per.iter().map(|v| mean_stderr(v)).unzip();
    Ok(StabilityCurve {
        n,
        algo,
        master_seed,
        rho_grid: rho_grid.to_vec(),
        tau: rho_grid.iter().map(|r| (-r).exp2()).collect(),
        mean_overlap,
        stderr,
        trials,
        predicted_threshold: predicted_threshold(n),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub rho: f64,
    pub tau: f64,
    /// Mean ‖X − Y‖₂².
    pub mean_sq_distance: f64,
    /// Mean Hamming distance between the two outputs.
    pub mean_hamming: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityProfile {
    pub n: usize,
    pub algo: Algorithm,
    pub master_seed: u64,
    pub rows: Vec<ProfileRow>,
}

/// Empirical stability functional: how far outputs move (in Hamming
/// distance) against how far inputs move (in squared Euclidean distance).
pub fn stability_profile(
    n: usize,
    rho_grid: &[f64],
    trials: usize,
    algo: Algorithm,
    master_seed: u64,
) -> Result<StabilityProfile> {
    check_grid(n, rho_grid, trials)?;
    let per = run_grid(n, rho_grid, trials, master_seed, |tr| {
        let a = algo.run(&tr.x, tr.rng_seed)?;
        let b = algo.run(&tr.y, tr.rng_seed)?;
        let dist: f64 = tr.x.weights().iter().zip(tr.y.weights()).map(|(p, q)| (p - q).powi(2)).sum();
        Ok((dist, a.sigma.hamming(&b.sigma) as f64))
    })?;
    let rows = rho_grid
        .iter()
        .zip(per)
        .map(|(&rho, v)| ProfileRow {
            rho,
            tau: (-rho).exp2(),
            mean_sq_distance: v.iter().map(|p| p.0).sum::<f64>() / trials as f64,
            mean_hamming: v.iter().map(|p| p.1).sum::<f64>() / trials as f64,
            trials,
        })
        .collect();
    Ok(StabilityProfile {
        n,
        algo,
        master_seed,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_follow_the_closed_form() {
        // α(ln n)²/ln 2 = (ln n)²/(2 ln²2).
        assert!((predicted_threshold(50) - 15.9265).abs() < 1e-3);
        assert!((predicted_threshold(100) - 22.0704).abs() < 1e-3);
        assert!((predicted_threshold(500) - 40.1930).abs() < 1e-3);
    }

    #[test]
    fn thresholds_near_quoted_figures() {
        // The often quoted 15.91 / 22.05 / 40.17 sit about 0.02 below the
        // exact closed form.
        for (n, v) in [(50, 15.91), (100, 22.05), (500, 40.17)] {
            assert!((predicted_threshold(n) - v).abs() < 0.03, "n = {n}");
        }
    }

    #[test]
    fn infinite_rho_gives_identical_outputs() {
        for algo in [Algorithm::Ldm, Algorithm::Pdm, Algorithm::Greedy] {
            let c = stability_curve(40, &[3.0, f64::INFINITY], 6, algo, 1).unwrap();
            assert_eq!(c.tau[1], 0.0);
            assert_eq!(c.mean_overlap[1], 1.0);
            assert!(c.mean_overlap.iter().all(|m| (-1.0..=1.0).contains(m)));
        }
    }

    #[test]
    fn deterministic_regardless_of_threads() {
        let grid = [1.0, 4.0, 9.0];
        let a = stability_curve(30, &grid, 5, Algorithm::Ldm, 9).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| stability_curve(30, &grid, 5, Algorithm::Ldm, 9).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(stability_curve(10, &[], 3, Algorithm::Ldm, 0).is_err());
        assert!(stability_curve(10, &[1.0], 0, Algorithm::Ldm, 0).is_err());
        assert!(stability_curve(10, &[2.0, 1.0], 3, Algorithm::Ldm, 0).is_err());
        assert!(stability_curve(10, &[-1.0], 3, Algorithm::Ldm, 0).is_err());
    }

    #[test]
    fn profile_endpoints() {
        let p = stability_profile(200, &[0.0, f64::INFINITY], 60, Algorithm::Ldm, 4).unwrap();
        let indep = &p.rows[0];
        assert_eq!(indep.tau, 1.0);
        // Independent outputs: d_H ~ Binomial(n, 1/2) per trial.
        let sd_of_mean = (200f64).sqrt() / 2.0 / (60f64).sqrt();
        assert!((indep.mean_hamming - 100.0).abs() <= 3.0 * (200f64).sqrt() / 2.0);
        assert!((indep.mean_hamming - 100.0).abs() <= 5.0 * sd_of_mean);
        let same = &p.rows[1];
        assert_eq!(same.mean_sq_distance, 0.0);
        assert_eq!(same.mean_hamming, 0.0);
    }

    #[test]
    fn profile_input_distance_matches_coupling() {
        let n = 1000;
        for rho in [0.5, 1.0, 2.0] {
            let p = stability_profile(n, &[rho], 40, Algorithm::Ldm, 7).unwrap();
            let tau: f64 = (-rho as f64).exp2();
            let want = 2.0 * n as f64 * (1.0 - (1.0 - tau * tau).sqrt());
            let got = p.rows[0].mean_sq_distance;
            assert!((got - want).abs() <= 0.05 * want, "rho {rho}: {got} vs {want}");
        }
    }
}
