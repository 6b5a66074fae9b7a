//! Overlap-band witnesses: pairs and m-tuples of near ground states.

use super::{enumerate::StateSet, OverlapBand};
use crate::error::{guard, NppError, Result};
use crate::instances::Instance;
use crate::solvers::energy;
use crate::spin::SpinConfig;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub const MAX_TUPLE: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessPair {
    pub a: SpinConfig,
    pub b: SpinConfig,
    /// Signed overlap ⟨a,b⟩/n.
    pub overlap: f64,
}

fn require_exhaustive(s: &StateSet) -> Result<()> {
    if !s.exhaustive {
        return Err(NppError::invalid("band certification needs an exhaustive state set"));
    }
    Ok(())
}

/// Walk the pairs of S ∪ −S that the band admits, one representative per
/// distinct pair up to global negation of both members.
///
/// Unsigned bands: each pair of distinct classes {±a}, {±b} yields one
/// witness (a, b), and each class yields (a, −a) when 1 is in the band.
/// Signed bands: (a, b) and (a, −b) are tested separately, and (a, −a) when
/// −1 is in the band.
fn for_each_pair(s: &StateSet, band: &OverlapBand, mut f: impl FnMut(&SpinConfig, &SpinConfig, i64, bool)) {
    let n = s.n;
    for (i, a) in s.states.iter().enumerate() {
        let antipodal = if band.signed { -1 } else { 1 };
        if band.contains_inner(antipodal * n as i64, n) {
            f(a, a, -(n as i64), true);
        }
        for b in &s.states[i + 1..] {
            let ip = a.inner(b);
            if band.contains_inner(ip, n) {
                f(a, b, ip, false);
            }
            if band.signed && band.contains_inner(-ip, n) {
                f(a, b, -ip, true);
            }
        }
    }
}

/// Every admitted pair as a witness; an empty list certifies that the band
/// holds no pair of near ground states for this instance.
pub fn check_pair_band(s: &StateSet, band: &OverlapBand) -> Result<Vec<WitnessPair>> {
    require_exhaustive(s)?;
    let n = s.n as f64;
    let mut out = Vec::new();
    for_each_pair(s, band, |a, b, ip, negate_b| {
        out.push(WitnessPair {
            a: a.clone(),
            b: if negate_b { b.negated() } else { b.clone() },
            overlap: ip as f64 / n,
        })
    });
    Ok(out)
}

/// `check_pair_band(..).len()` without materializing the witnesses.
pub fn count_pair_band(s: &StateSet, band: &OverlapBand) -> Result<u64> {
    require_exhaustive(s)?;
    let mut c = 0u64;
    for_each_pair(s, band, |_, _, _, _| c += 1);
    Ok(c)
}

/// An m-tuple of near ground states with all pairwise overlaps in a band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OgpWitness {
    pub members: Vec<SpinConfig>,
    pub taus: Vec<f64>,
    /// Signed overlaps; symmetric with unit diagonal.
    pub overlaps: Vec<Vec<f64>>,
    /// Normalized energy of member i on instance i.
    pub energies: Vec<f64>,
}

impl OgpWitness {
    /// Re-check every constraint from scratch: energies recomputed on
    /// `instances[i]` against `threshold`, overlaps recomputed from the
    /// members, and the stored matrix compared with them.
    pub fn validate(&self, instances: &[&Instance], band: &OverlapBand, threshold: f64) -> Result<()> {
        let m = self.members.len();
        if instances.len() != m || self.overlaps.len() != m || self.energies.len() != m || self.taus.len() != m {
            return Err(NppError::invalid("witness fields disagree on m"));
        }
        for (i, (s, x)) in self.members.iter().zip(instances).enumerate() {
            let e = energy(x, s)?.normalized;
            if e > threshold {
                return Err(NppError::invalid(format!("member {i} has energy {e} > {threshold}")));
            }
            if e != self.energies[i] {
                return Err(NppError::invalid(format!("member {i} energy mismatch")));
            }
        }
        for i in 0..m {
            if self.overlaps[i].len() != m || self.overlaps[i][i] != 1.0 {
                return Err(NppError::invalid("overlap matrix needs a unit diagonal"));
            }
            for j in 0..m {
                let q = super::overlap(&self.members[i], &self.members[j], true)?;
                if self.overlaps[i][j] != q || self.overlaps[j][i] != q {
                    return Err(NppError::invalid(format!("overlap ({i},{j}) mismatch")));
                }
                if i != j && !band.contains(q) {
                    return Err(NppError::invalid(format!("overlap ({i},{j}) = {q} outside band")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MtupleOptions {
    /// Require pairwise distinct members.
    pub distinct: bool,
}

impl Default for MtupleOptions {
    fn default() -> Self {
        Self { distinct: true }
    }
}

/// Backtracking search for σ^(i) ∈ ±S_list[i] with all pairwise overlaps in
/// `band`. `None` certifies that no such tuple exists.
pub fn find_mtuple(sets: &[StateSet], band: &OverlapBand, m: usize) -> Result<Option<OgpWitness>> {
    find_mtuple_with(sets, band, m, MtupleOptions::default())
}

struct Search<'a> {
    sets: &'a [StateSet],
    band: &'a OverlapBand,
    opts: MtupleOptions,
    n: usize,
    /// Canonical masks per set, for radius lookups.
    lookup: Vec<HashSet<u64>>,
    /// Hamming distances allowed from the first member.
    dist: (usize, usize),
    log2_ball: f64,
    chosen: Vec<SpinConfig>,
    picked: Vec<usize>,
    /// Candidates for levels 1.. compatible with the first member.
    pools: Vec<Vec<(SpinConfig, usize)>>,
}

impl Search<'_> {
    fn ok_with_chosen(&self, s: &SpinConfig) -> bool {
        self.chosen.iter().all(|c| {
            if self.opts.distinct && c == s {
                return false;
            }
            self.band.contains_inner(c.inner(s), self.n)
        })
    }

    fn candidates(&self, level: usize) -> Vec<(SpinConfig, usize)> {
        let set = &self.sets[level];
        if level == 0 {
            // Global negation preserves every constraint.
            return set.states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        }
        let use_signs = self.band.signed;
        let scan_cost = (set.len() as f64 * if use_signs { 2.0 } else { 1.0 }).log2();
        let mut out = Vec::new();
        if self.n <= 64 && self.log2_ball < scan_cost {
            let center = self.chosen[0].as_mask().unwrap_or(0);
            for d in self.dist.0..=self.dist.1 {
                for_each_subset(self.n, d, |flip| {
                    let m = center ^ flip;
                    let s = SpinConfig::from_mask(self.n, m);
                    let canon = s.canonical();
                    let key = canon.as_mask().unwrap();
                    if self.lookup[level].contains(&key) {
                        let cand = if use_signs { s } else { canon };
                        let idx = set.states.binary_search_by(|t| t.as_mask().cmp(&Some(key))).unwrap();
                        out.push((cand, idx));
                    }
                });
            }
            if !use_signs {
                out.sort_by_key(|(s, _)| s.as_mask());
                out.dedup();
            }
        } else {
            for (i, s) in set.states.iter().enumerate() {
                out.push((s.clone(), i));
                if use_signs {
                    out.push((s.negated(), i));
                }
            }
        }
        out
    }

    fn go(&mut self, level: usize) -> bool {
        if level == self.sets.len() {
            return true;
        }
        if level == 0 {
            for (s, idx) in self.candidates(0) {
                self.chosen.push(s);
                self.picked.push(idx);
                // Every later level only depends on the first member through
                // its candidate pool, so build the pools once here.
                self.pools = (1..self.sets.len())
                    .map(|l| self.candidates(l).into_iter().filter(|(c, _)| self.ok_with_chosen(c)).collect())
                    .collect();
                if self.pools.iter().all(|p| !p.is_empty()) && self.go(1) {
                    return true;
                }
                self.chosen.pop();
                self.picked.pop();
            }
            return false;
        }
        for k in 0..self.pools[level - 1].len() {
            let (s, idx) = self.pools[level - 1][k].clone();
            if !self.ok_with_chosen(&s) {
                continue;
            }
            self.chosen.push(s);
            self.picked.push(idx);
            if self.go(level + 1) {
                return true;
            }
            self.chosen.pop();
            self.picked.pop();
        }
        false
    }
}

/// Calls `f` with every n-bit mask of popcount d (Gosper's hack).
fn for_each_subset(n: usize, d: usize, mut f: impl FnMut(u64)) {
    if d > n {
        return;
    }
    let limit: u128 = 1u128 << n;
    let mut x: u128 = (1u128 << d) - 1;
    loop {
        f(x as u64);
        if x == 0 {
            return;
        }
        let c = x & x.wrapping_neg();
        let r = x + c;
        let next = (((r ^ x) >> 2) / c) | r;
        if next >= limit {
            return;
        }
        x = next;
    }
}

fn log2_ball(n: usize, lo: usize, hi: usize) -> f64 {
    let mut total = 0.0f64;
    for d in lo..=hi.min(n) {
        total += crate::analysis::log2_binomial(n as u64, d as u64).unwrap().exp2();
    }
    total.log2()
}

pub fn find_mtuple_with(
    sets: &[StateSet],
    band: &OverlapBand,
    m: usize,
    opts: MtupleOptions,
) -> Result<Option<OgpWitness>> {
    guard("find_mtuple", m, MAX_TUPLE)?;
    if m == 0 || sets.len() != m {
        return Err(NppError::invalid(format!("find_mtuple needs m >= 1 state sets, got {} for m = {m}", sets.len())));
    }
    let n = sets[0].n;
    if sets.iter().any(|s| s.n != n) {
        return Err(NppError::invalid("state sets disagree on n"));
    }
    // d(a,b) + d(b,c) + d(a,c) is always even, so three or more members
    // need some even Hamming distance inside the band.
    if m >= 3 && !(0..=n).step_by(2).any(|d| band.contains_inner(n as i64 - 2 * d as i64, n)) {
        return Ok(None);
    }
    let signed_band = if band.signed {
        *band
    } else {
        // |q| ∈ [lo, hi] is covered by d ranges on both sides; take the
        // full span for radius lookups and let the exact check filter.
        OverlapBand::signed(-band.hi, band.hi)?
    };
    let dist = signed_band.signed_distance_range(n);
    let mut search = Search {
        sets,
        band,
        opts,
        n,
        lookup: sets
            .iter()
            .map(|s| s.states.iter().filter_map(SpinConfig::as_mask).collect())
            .collect(),
        dist,
        log2_ball: if dist.0 <= dist.1 { log2_ball(n, dist.0, dist.1) } else { f64::NEG_INFINITY },
        chosen: Vec::with_capacity(m),
        picked: Vec::with_capacity(m),
        pools: Vec::new(),
    };
    if !search.go(0) {
        return Ok(None);
    }
    let members = search.chosen;
    let overlaps = members
        .iter()
        .map(|a| members.iter().map(|b| super::overlap(a, b, true)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let energies = search.picked.iter().zip(sets).map(|(&i, s)| s.energies[i]).collect();
    Ok(Some(OgpWitness {
        taus: sets.iter().map(|s| s.tau).collect(),
        members,
        overlaps,
        energies,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Mode;
    use crate::landscape::enumerate::{enumerate_below, enumerate_states};

    fn set(n: usize, seed: u64, e_n: f64) -> (Instance, StateSet) {
        let x = Instance::generate(n, seed, Mode::quantized_default()).unwrap();
        let s = enumerate_states(&x, e_n).unwrap();
        (x, s)
    }

    /// Oracle: all ordered pairs of distinct members of S ∪ −S in the band,
    /// as sign vectors, reduced modulo global negation of the pair.
    fn naive_pairs(s: &StateSet, band: &OverlapBand) -> usize {
        let mut full: Vec<SpinConfig> = s.states.clone();
        full.extend(s.states.iter().map(SpinConfig::negated));
        let mut seen = HashSet::new();
        for a in &full {
            for b in &full {
                if a == b {
                    continue;
                }
                let q = crate::landscape::overlap(a, b, true).unwrap();
                if !band.contains(q) {
                    continue;
                }
                // Unordered pair, then identify {a,b} with {−a,−b}.
                let key = |x: &SpinConfig, y: &SpinConfig| {
                    let (p, q) = (x.as_mask().unwrap(), y.as_mask().unwrap());
                    (p.min(q), p.max(q))
                };
                let k1 = key(a, b);
                let k2 = key(&a.negated(), &b.negated());
                let k = if k1 <= k2 { k1 } else { k2 };
                seen.insert(if band.signed { k } else {
                    // Unsigned: the four sign choices collapse to one class pair.
                    let ca = a.canonical().as_mask().unwrap();
                    let cb = b.canonical().as_mask().unwrap();
                    if ca <= cb { (ca, cb) } else { (cb, ca) }
                });
            }
        }
        seen.len()
    }

    #[test]
    fn pair_counts_match_oracle() {
        for seed in 0..5 {
            let (_, s) = set(12, seed, 2.0);
            for band in [
                OverlapBand::unsigned(0.0, 1.0).unwrap(),
                OverlapBand::unsigned(0.3, 0.8).unwrap(),
                OverlapBand::unsigned(1.0, 1.0).unwrap(),
                OverlapBand::signed(-1.0, 1.0).unwrap(),
                OverlapBand::signed(-0.5, 0.2).unwrap(),
                OverlapBand::signed(-1.0, -1.0).unwrap(),
            ] {
                let got = check_pair_band(&s, &band).unwrap();
                assert_eq!(got.len(), naive_pairs(&s, &band), "seed {seed} band {band:?}");
                assert_eq!(count_pair_band(&s, &band).unwrap(), got.len() as u64);
                for w in &got {
                    assert_eq!(crate::landscape::overlap(&w.a, &w.b, true).unwrap(), w.overlap);
                    assert!(band.contains(w.overlap));
                }
            }
        }
    }

    #[test]
    fn full_unsigned_band_cardinality() {
        let (_, s) = set(12, 3, 1.0);
        let k = s.len() as u64;
        let c = count_pair_band(&s, &OverlapBand::unsigned(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(c, k * (k - 1) / 2 + k);
        let antipodal = count_pair_band(&s, &OverlapBand::unsigned(1.0, 1.0).unwrap()).unwrap();
        assert!(antipodal >= k);
    }

    #[test]
    fn pair_band_needs_exhaustive_set() {
        let (_, mut s) = set(10, 1, 1.0);
        s.exhaustive = false;
        assert!(check_pair_band(&s, &OverlapBand::unsigned(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn mtuple_trivial_cases() {
        let (x, s) = set(12, 5, 2.0);
        assert!(!s.is_empty());
        let band = OverlapBand::signed(-1.0, 1.0).unwrap();
        let w = find_mtuple(std::slice::from_ref(&s), &band, 1).unwrap().unwrap();
        w.validate(&[&x], &band, s.threshold).unwrap();
        let w = find_mtuple(&[s.clone(), s.clone()], &band, 2).unwrap().unwrap();
        w.validate(&[&x, &x], &band, s.threshold).unwrap();
        let empty = enumerate_below(&x, 0.0, 28).unwrap();
        assert!(find_mtuple(&[s.clone(), empty], &band, 2).unwrap().is_none());
    }

    #[test]
    fn mtuple_single_state_uses_its_negation() {
        let (x, s) = set(14, 2, 2.0);
        let one = StateSet {
            states: s.states[..1].to_vec(),
            energies: s.energies[..1].to_vec(),
            ..s.clone()
        };
        let band = OverlapBand::signed(-1.0, 1.0).unwrap();
        let w = find_mtuple(&[one.clone(), one], &band, 2).unwrap().unwrap();
        assert_eq!(w.overlaps[0][1], -1.0);
        w.validate(&[&x, &x], &band, s.threshold).unwrap();
    }

    /// Brute-force oracle for tuple existence over ±S.
    fn exists(sets: &[StateSet], band: &OverlapBand, chosen: &mut Vec<SpinConfig>) -> bool {
        let level = chosen.len();
        if level == sets.len() {
            return true;
        }
        for s in &sets[level].states {
            for c in [s.clone(), s.negated()] {
                let ok = chosen.iter().all(|p| p != &c && band.contains(crate::landscape::overlap(p, &c, true).unwrap()));
                if ok {
                    chosen.push(c);
                    if exists(sets, band, chosen) {
                        return true;
                    }
                    chosen.pop();
                }
            }
        }
        false
    }

    #[test]
    fn mtuple_agrees_with_oracle_and_validates() {
        for seed in 0..12 {
            let (x, s0) = set(12, seed, 3.5);
            let (y, s1) = set(12, seed + 100, 3.5);
            for (lo, hi) in [(0.1, 0.3), (0.5, 0.7), (0.8, 0.9), (-0.3, 0.0), (0.95, 1.0)] {
                let band = OverlapBand::signed(lo, hi).unwrap();
                let sets = [s0.clone(), s1.clone(), s0.clone()];
                let got = find_mtuple(&sets, &band, 3).unwrap();
                assert_eq!(got.is_some(), exists(&sets, &band, &mut Vec::new()), "seed {seed} [{lo},{hi}]");
                if let Some(w) = got {
                    w.validate(&[&x, &y, &x], &band, s0.threshold).unwrap();
                    assert_eq!(w.taus, vec![0.0; 3]);
                }
            }
        }
    }

    #[test]
    fn validate_rejects_tampering() {
        let (x, s) = set(12, 8, 1.0);
        let band = OverlapBand::signed(0.0, 0.5).unwrap();
        let mut w = find_mtuple(&[s.clone(), s.clone()], &band, 2).unwrap().unwrap();
        w.validate(&[&x, &x], &band, s.threshold).unwrap();
        let narrow = OverlapBand::signed(0.9, 1.0).unwrap();
        assert!(w.validate(&[&x, &x], &narrow, s.threshold).is_err());
        assert!(w.validate(&[&x, &x], &band, 0.0).is_err());
        w.overlaps[0][1] = 0.123;
        assert!(w.validate(&[&x, &x], &band, s.threshold).is_err());
    }

    #[test]
    fn odd_only_bands_hold_no_triples() {
        // n = 8, q = 1/4 means d = 3 exactly; pairs exist but triples cannot.
        let (_, s) = set(8, 2, 0.0);
        let band = OverlapBand::signed(0.2, 0.3).unwrap();
        assert!(!check_pair_band(&s, &band).unwrap().is_empty());
        let mut full: Vec<SpinConfig> = s.states.clone();
        full.extend(s.states.iter().map(SpinConfig::negated));
        let ok = |a: &SpinConfig, b: &SpinConfig| band.contains(crate::landscape::overlap(a, b, true).unwrap());
        let any = full.iter().any(|a| full.iter().any(|b| ok(a, b) && full.iter().any(|c| ok(a, c) && ok(b, c))));
        assert!(!any);
        assert!(find_mtuple(&[s.clone(), s.clone(), s], &band, 3).unwrap().is_none());
    }

    #[test]
    fn mtuple_guard() {
        let (_, s) = set(10, 1, 1.0);
        let band = OverlapBand::signed(-1.0, 1.0).unwrap();
        let sets = vec![s; 7];
        assert!(matches!(find_mtuple(&sets, &band, 7), Err(NppError::ResourceLimit { .. })));
    }

    #[test]
    fn subsets_of_each_weight() {
        for n in [1usize, 5, 10, 64] {
            for d in [0usize, 1, 2, 3] {
                let mut c = 0u64;
                for_each_subset(n, d, |x| {
                    assert_eq!(x.count_ones() as usize, d);
                    c += 1;
                });
                let want = if d > n {
                    0
                } else {
                    (0..d as u64).fold(1u64, |a, i| a * (n as u64 - i) / (i + 1))
                };
                assert_eq!(c, want, "n {n} d {d}");
            }
        }
    }
}
