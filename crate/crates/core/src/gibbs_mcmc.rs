//! Exact Gibbs measures on small hypercubes and single-flip Markov chains.
//!
//! π_β(σ) ∝ exp(−βH(σ)) with H(σ) = |⟨σ,X⟩|/√n. All masses are carried in
//! log domain: β is typically n·2^(nε), where exp(−βH) underflows.
//!
//! Regions around a ground state σ*, by q = ⟨σ,σ*⟩/n:
//! I₃ = {σ*} (q = 1), Ī₃ = {−σ*} (q = −1), I₂ = {ρ < q ≤ (n−2)/n},
//! Ī₂ = −I₂ and I₁ = {|q| ≤ ρ}. Together they partition the cube.

use crate::error::{guard, NppError, Result};
use crate::instances::{Instance, Weights};
use crate::landscape::gray_walk;
use crate::rng::NormalStream;
use crate::serde_util::neg_inf_as_null;
use crate::solvers::{energy, solve_exact, Scalar};
use crate::spin::SpinConfig;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

pub const DEFAULT_GIBBS_MAX_N: usize = 24;
/// Per-state tables (visit counts, exact probabilities) are limited to this n.
pub const STATE_TABLE_MAX_N: usize = 20;

/// Streaming log-sum-exp accumulator.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    max: f64,
    sum: f64,
}

impl LogSum {
    const EMPTY: Self = Self {
        max: f64::NEG_INFINITY,
        sum: 0.0,
    };

    #[inline]
    fn add(&mut self, v: f64) {
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.sum += (v - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    fn value(&self) -> f64 {
        if self.sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

fn log_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = LogSum::EMPTY;
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Region values; either log-probabilities or probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regions {
    #[serde(with = "neg_inf_as_null")]
    pub i1: f64,
    #[serde(with = "neg_inf_as_null")]
    pub i2: f64,
    #[serde(with = "neg_inf_as_null")]
    pub i2_bar: f64,
    #[serde(with = "neg_inf_as_null")]
    pub i3: f64,
    #[serde(with = "neg_inf_as_null")]
    pub i3_bar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GibbsSummary {
    pub n: usize,
    pub beta: f64,
    pub log_z: f64,
    pub sigma_star: SpinConfig,
    pub rho: f64,
    /// Natural-log region probabilities.
    pub log_region_masses: Regions,
    pub region_masses: Regions,
    /// Probability of q = (2j − n)/n at index j = 0..=n.
    pub overlap_histogram: Vec<f64>,
    /// Natural logs of the same.
    pub log_overlap_histogram: Vec<f64>,
}

fn region_of(q_index: usize, n: usize, rho: f64) -> usize {
    // 0: I1, 1: I2, 2: I2bar, 3: I3, 4: I3bar.
    let ip = 2 * q_index as i64 - n as i64;
    let q = ip as f64 / n as f64;
    if ip == n as i64 {
        3
    } else if ip == -(n as i64) {
        4
    } else if q > rho {
        1
    } else if q < -rho {
        2
    } else {
        0
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(NppError::invalid(format!("beta must be finite and >= 0, got {beta}")));
    }
    Ok(())
}

/// Visit every canonical state with its energy H.
fn walk_energies(x: &Instance, mut visit: impl FnMut(u64, f64)) {
    let root_n = (x.n() as f64).sqrt();
    match x.view() {
        Weights::Float(w) => gray_walk(w, |m, s| visit(m, s.abs() / root_n)),
        Weights::Int { values, bits } => {
            let unit = 2f64.powi(-(bits as i32)) / root_n;
            gray_walk(values, |m, s| visit(m, s.abs() as f64 * unit))
        }
    }
}

pub fn gibbs_exact(x: &Instance, beta: f64, sigma_star: &SpinConfig, rho: f64) -> Result<GibbsSummary> {
    gibbs_exact_capped(x, beta, sigma_star, rho, DEFAULT_GIBBS_MAX_N)
}

/// Exhaustive Gibbs summary relative to `sigma_star` with region boundary
/// `rho`. Each canonical state and its negation contribute the same weight
/// to mirrored histogram bins in the same order, so mirrored regions come
/// out bit-identical.
pub fn gibbs_exact_capped(
    x: &Instance,
    beta: f64,
    sigma_star: &SpinConfig,
    rho: f64,
    max_n: usize,
) -> Result<GibbsSummary> {
    let n = x.n();
    guard("gibbs_exact", n, max_n.min(63))?;
    check_beta(beta)?;
    if sigma_star.len() != n {
        return Err(NppError::invalid("sigma_star length differs from the instance"));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(NppError::invalid(format!("rho = {rho} outside [0, 1]")));
    }
    let star = sigma_star.as_mask().expect("n <= 64");
    // Histogram by Hamming distance to σ*.
    let mut by_distance = vec![LogSum::EMPTY; n + 1];
    walk_energies(x, |m, h| {
        let v = -beta * h;
        let d = (m ^ star).count_ones() as usize;
        by_distance[d].add(v);
        by_distance[n - d].add(v);
    });
    // Bin j has inner product 2j − n, i.e. distance n − j.
    let log_bins: Vec<f64> = (0..=n).map(|j| by_distance[n - j].value()).collect();
    let log_z = log_sum(log_bins.iter().copied());
    let log_hist: Vec<f64> = log_bins.iter().map(|b| b - log_z).collect();

    let mut acc = [LogSum::EMPTY; 5];
    // Upper half ascending, lower half descending: mirrored regions see the
    // same sequence of (identical) bin values.
    for j in (0..=n).filter(|&j| 2 * j >= n) {
        acc[region_of(j, n, rho)].add(log_hist[j]);
        if 2 * j != n {
            acc[region_of(n - j, n, rho)].add(log_hist[n - j]);
        }
    }
    let log_masses = Regions {
        i1: acc[0].value(),
        i2: acc[1].value(),
        i2_bar: acc[2].value(),
        i3: acc[3].value(),
        i3_bar: acc[4].value(),
    };
    Ok(GibbsSummary {
        n,
        beta,
        log_z,
        sigma_star: sigma_star.clone(),
        rho,
        region_masses: Regions {
            i1: log_masses.i1.exp(),
            i2: log_masses.i2.exp(),
            i2_bar: log_masses.i2_bar.exp(),
            i3: log_masses.i3.exp(),
            i3_bar: log_masses.i3_bar.exp(),
        },
        log_region_masses: log_masses,
        overlap_histogram: log_hist.iter().map(|v| v.exp()).collect(),
        log_overlap_histogram: log_hist,
    })
}

/// Free-energy-well ratios π(I₁)/π(I₂) and π(I₃)/π(I₂) as natural logs;
/// +∞ when I₂ carries no mass.
pub fn few_log_ratio(s: &GibbsSummary) -> (f64, f64) {
    let m = &s.log_region_masses;
    if m.i2 == f64::NEG_INFINITY {
        return (f64::INFINITY, f64::INFINITY);
    }
    (m.i1 - m.i2, m.i3 - m.i2)
}

/// The same ratios as plain numbers (may overflow to +∞).
pub fn few_ratio(s: &GibbsSummary) -> (f64, f64) {
    let (a, b) = few_log_ratio(s);
    (a.exp(), b.exp())
}

/// π_β({σ : H(σ) ≤ threshold}).
pub fn gibbs_mass_below(x: &Instance, beta: f64, threshold: f64) -> Result<f64> {
    guard("gibbs_mass_below", x.n(), DEFAULT_GIBBS_MAX_N)?;
    check_beta(beta)?;
    let mut all = LogSum::EMPTY;
    let mut low = LogSum::EMPTY;
    walk_energies(x, |_, h| {
        all.add(-beta * h);
        if h <= threshold {
            low.add(-beta * h);
        }
    });
    Ok((low.value() - all.value()).exp())
}

/// π_β(σ) for every σ, indexed by mask, computed directly from the
/// definition. Small n only.
pub fn state_probabilities(x: &Instance, beta: f64) -> Result<Vec<f64>> {
    let n = x.n();
    guard("state_probabilities", n, STATE_TABLE_MAX_N)?;
    check_beta(beta)?;
    let logw: Vec<f64> = (0..(1u64 << n))
        .map(|m| energy(x, &SpinConfig::from_mask(n, m)).map(|e| -beta * e.normalized))
        .collect::<Result<_>>()?;
    let log_z = log_sum(logw.iter().copied());
    Ok(logw.iter().map(|v| (v - log_z).exp()).collect())
}

/// Single-flip proposal/acceptance rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    /// Accept with probability min(1, exp(−βΔH)).
    #[default]
    Metropolis,
    /// Heat bath: accept with probability 1/(1 + exp(βΔH)).
    Glauber,
}

impl Kernel {
    #[inline]
    fn accept_probability(self, beta: f64, delta_h: f64) -> f64 {
        match self {
            Kernel::Metropolis => {
                if delta_h <= 0.0 {
                    1.0
                } else {
                    (-beta * delta_h).exp()
                }
            }
            Kernel::Glauber => {
                let z = beta * delta_h;
                // Logistic in a form that does not overflow.
                if z >= 0.0 {
                    let e = (-z).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + z.exp())
                }
            }
        }
    }
}

/// Q(σ, σ^(i)): probability that one step from σ moves to σ with spin i
/// flipped (coordinate chosen uniformly, then accepted).
pub fn transition_probability(
    x: &Instance,
    beta: f64,
    sigma: &SpinConfig,
    i: usize,
    kernel: Kernel,
) -> Result<f64> {
    check_beta(beta)?;
    if i >= x.n() {
        return Err(NppError::invalid(format!("coordinate {i} out of range")));
    }
    let h0 = energy(x, sigma)?.normalized;
    let h1 = energy(x, &sigma.flipped(i))?.normalized;
    Ok(kernel.accept_probability(beta, h1 - h0) / x.n() as f64)
}

/// What a chain run records.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RecordOptions {
    /// Record traces every `every` steps (and at t = 0); 0 disables traces.
    pub every: u64,
    /// Reference for the overlap trace; defaults to no overlap trace.
    pub reference: Option<SpinConfig>,
    /// Count visits to each state after each step (n ≤ 20).
    pub visits: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTrajectory {
    pub seed: u64,
    pub steps_run: u64,
    /// First exit time from {σ*} ∪ ∂S; `None` if censored at the budget or
    /// not an escape run.
    pub escape_time: Option<u64>,
    pub censored: bool,
    pub initial: SpinConfig,
    pub last: SpinConfig,
    /// (t, H(X_t)).
    pub energy_trace: Option<Vec<(u64, f64)>>,
    /// (t, ⟨X_t, reference⟩/n).
    pub overlap_trace: Option<Vec<(u64, f64)>>,
    #[serde(skip)]
    pub visit_counts: Option<Vec<u64>>,
}

/// Running state of a chain: the configuration and its signed sum.
struct Chain<'a, T> {
    w: &'a [T],
    to_h: f64,
    sigma: SpinConfig,
    sum: T,
}

impl<'a, T: Scalar> Chain<'a, T> {
    fn new(w: &'a [T], to_h: f64, sigma: SpinConfig) -> Self {
        let sum = crate::solvers::signed_sum(w, &sigma);
        Self { w, to_h, sigma, sum }
    }

    #[inline]
    fn h(&self) -> f64 {
        self.sum.abs().to_f64() * self.to_h
    }

    /// One step; returns the flipped coordinate if the move was accepted.
    #[inline]
    fn step(&mut self, beta: f64, kernel: Kernel, rng: &mut NormalStream) -> Option<usize> {
        let n = self.w.len();
        let i = rng.below(n as u64) as usize;
        let moved = if self.sigma.is_plus(i) {
            self.sum - self.w[i].double()
        } else {
            self.sum + self.w[i].double()
        };
        let dh = match moved.abs().cmp_total(&self.sum.abs()) {
            Ordering::Equal => 0.0,
            _ => (moved.abs().to_f64() - self.sum.abs().to_f64()) * self.to_h,
        };
        let accept = if dh <= 0.0 && kernel == Kernel::Metropolis {
            true
        } else {
            rng.uniform() < kernel.accept_probability(beta, dh)
        };
        if accept {
            self.sigma.flip(i);
            self.sum = moved;
            Some(i)
        } else {
            None
        }
    }
}

fn scale_for(x: &Instance) -> f64 {
    let root_n = (x.n() as f64).sqrt();
    match x.view() {
        Weights::Float(_) => 1.0 / root_n,
        Weights::Int { bits, .. } => 2f64.powi(-(bits as i32)) / root_n,
    }
}

/// Stop rule for a chain: given the flipped coordinate and the step index,
/// return true to stop.
type StopRule<'a> = &'a mut dyn FnMut(&SpinConfig, Option<usize>, u64) -> bool;

#[allow(clippy::too_many_arguments)]
fn drive<T: Scalar>(
    w: &[T],
    to_h: f64,
    beta: f64,
    init: SpinConfig,
    steps: u64,
    seed: u64,
    rng: &mut NormalStream,
    record: &RecordOptions,
    kernel: Kernel,
    stop: StopRule<'_>,
) -> ChainTrajectory {
    let n = w.len();
    let mut chain = Chain::new(w, to_h, init.clone());
    let mut energy_trace = (record.every > 0).then(Vec::new);
    let mut overlap_trace = (record.every > 0 && record.reference.is_some()).then(Vec::new);
    let mut visits = (record.visits && n <= STATE_TABLE_MAX_N).then(|| vec![0u64; 1 << n]);
    let reference = record.reference.as_ref();
    let mut inner = reference.map(|r| chain.sigma.inner(r)).unwrap_or(0);
    let every = record.every;
    let mut log = |t: u64, h: f64, inner: i64| {
        if every > 0 && t % every == 0 {
            if let Some(v) = energy_trace.as_mut() {
                v.push((t, h));
            }
            if let Some(v) = overlap_trace.as_mut() {
                v.push((t, inner as f64 / n as f64));
            }
        }
    };
    log(0, chain.h(), inner);
    let mut t = 0u64;
    let mut stopped = false;
    while t < steps {
        t += 1;
        let flipped = chain.step(beta, kernel, rng);
        if let (Some(i), Some(r)) = (flipped, reference) {
            // After the flip, agreement at i changed sign.
            inner += if chain.sigma.is_plus(i) == r.is_plus(i) { 2 } else { -2 };
        }
        if let Some(v) = visits.as_mut() {
            v[chain.sigma.as_mask().unwrap() as usize] += 1;
        }
        log(t, chain.h(), inner);
        if stop(&chain.sigma, flipped, t) {
            stopped = true;
            break;
        }
    }
    ChainTrajectory {
        seed,
        steps_run: t,
        escape_time: None,
        censored: !stopped,
        initial: init,
        last: chain.sigma,
        energy_trace,
        overlap_trace,
        visit_counts: visits,
    }
}

/// Run `steps` steps of the Metropolis chain from `init`.
pub fn run_chain(
    x: &Instance,
    beta: f64,
    init: &SpinConfig,
    steps: u64,
    seed: u64,
    record: &RecordOptions,
) -> Result<ChainTrajectory> {
    run_chain_with(x, beta, init, steps, seed, record, Kernel::Metropolis)
}

pub fn run_chain_with(
    x: &Instance,
    beta: f64,
    init: &SpinConfig,
    steps: u64,
    seed: u64,
    record: &RecordOptions,
    kernel: Kernel,
) -> Result<ChainTrajectory> {
    check_beta(beta)?;
    if init.len() != x.n() {
        return Err(NppError::invalid("initial state length differs from the instance"));
    }
    if record.reference.as_ref().is_some_and(|r| r.len() != x.n()) {
        return Err(NppError::invalid("reference length differs from the instance"));
    }
    let mut rng = NormalStream::new(seed);
    let to_h = scale_for(x);
    let mut never = |_: &SpinConfig, _: Option<usize>, _: u64| false;
    let mut tr = match x.view() {
        Weights::Float(w) => drive(w, to_h, beta, init.clone(), steps, seed, &mut rng, record, kernel, &mut never),
        Weights::Int { values, .. } => {
            drive(values, to_h, beta, init.clone(), steps, seed, &mut rng, record, kernel, &mut never)
        }
    };
    tr.censored = false;
    Ok(tr)
}

/// Escape time from {σ*} ∪ ∂S with σ* from the exact solver.
pub fn escape_time(x: &Instance, beta: f64, max_steps: u64, seed: u64) -> Result<ChainTrajectory> {
    let star = solve_exact(x)?.sigma;
    escape_time_from(x, beta, &star, max_steps, seed, Kernel::Metropolis)
}

/// X₀ is drawn exactly from π_β restricted to σ* and its n single-flip
/// neighbours; the chain then runs until the first t ≥ 1 with
/// d_H(X_t, σ*) ≥ 2. Exceeding `max_steps` gives a censored trajectory.
pub fn escape_time_from(
    x: &Instance,
    beta: f64,
    star: &SpinConfig,
    max_steps: u64,
    seed: u64,
    kernel: Kernel,
) -> Result<ChainTrajectory> {
    check_beta(beta)?;
    let n = x.n();
    if star.len() != n {
        return Err(NppError::invalid("sigma_star length differs from the instance"));
    }
    let mut rng = NormalStream::new(seed);
    let mut states = vec![star.clone()];
    states.extend((0..n).map(|i| star.flipped(i)));
    let logw: Vec<f64> = states
        .iter()
        .map(|s| energy(x, s).map(|e| -beta * e.normalized))
        .collect::<Result<_>>()?;
    let log_z = log_sum(logw.iter().copied());
    let u = rng.uniform();
    let mut cdf = 0.0;
    let mut pick = states.len() - 1;
    for (k, v) in logw.iter().enumerate() {
        cdf += (v - log_z).exp();
        if u < cdf {
            pick = k;
            break;
        }
    }
    let init = states.swap_remove(pick);
    let mut dist = init.hamming(star) as i64;
    let mut stop = |s: &SpinConfig, flipped: Option<usize>, _t: u64| {
        if let Some(i) = flipped {
            dist += if s.is_plus(i) == star.is_plus(i) { -1 } else { 1 };
        }
        dist > 1
    };
    let to_h = scale_for(x);
    let record = RecordOptions::default();
    let mut tr = match x.view() {
        Weights::Float(w) => drive(w, to_h, beta, init, max_steps, seed, &mut rng, &record, kernel, &mut stop),
        Weights::Int { values, .. } => {
            drive(values, to_h, beta, init, max_steps, seed, &mut rng, &record, kernel, &mut stop)
        }
    };
    if !tr.censored {
        tr.escape_time = Some(tr.steps_run);
    }
    Ok(tr)
}

/// Median of possibly censored times.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensoredMedian {
    Value(f64),
    /// More than half of the runs hit the budget.
    Censored,
}

/// Lower median with censored runs ordered after every observed time. It
/// is censored exactly when more than half of the runs are.
pub fn censored_median(times: &[Option<u64>]) -> Result<CensoredMedian> {
    if times.is_empty() {
        return Err(NppError::invalid("median of an empty sample"));
    }
    let mut seen: Vec<u64> = times.iter().flatten().copied().collect();
    seen.sort_unstable();
    let k = (times.len() - 1) / 2;
    Ok(match seen.get(k) {
        Some(&v) => CensoredMedian::Value(v as f64),
        None => CensoredMedian::Censored,
    })
}
