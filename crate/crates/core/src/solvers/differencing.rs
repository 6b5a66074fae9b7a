//! Karmarkar–Karp differencing: LDM and PDM.
//!
//! Both operate on the magnitudes |X_i|; the sign of X_i is folded back in
//! when the partition is recovered. Each differencing step records a tree
//! node (larger, smaller). The root gets +, a node's larger child inherits
//! its sign and the smaller child the opposite sign.
//!
//! Ties in value are broken by index: the lower key counts as larger. A
//! merged node keeps the key of its larger child.

use super::{EnergyRecord, Scalar};
use crate::error::Result;
use crate::instances::{Instance, Weights};
use crate::spin::SpinConfig;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug)]
struct Item<T> {
    value: T,
    key: usize,
    node: usize,
}

impl<T: Scalar> Item<T> {
    /// Priority order: larger value first, then lower key.
    fn priority(&self, other: &Self) -> Ordering {
        self.value
            .cmp_total(&other.value)
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl<T: Scalar> PartialEq for Item<T> {
    fn eq(&self, other: &Self) -> bool {
        self.priority(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for Item<T> {}
impl<T: Scalar> PartialOrd for Item<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for Item<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority(other)
    }
}

/// Nodes 0..n are leaves; node n + k is the k-th differencing step.
struct Tree {
    n: usize,
    children: Vec<(usize, usize)>,
}

impl Tree {
    fn new(n: usize) -> Self {
        Self {
            n,
            children: Vec::with_capacity(n.saturating_sub(1)),
        }
    }

    fn join(&mut self, larger: usize, smaller: usize) -> usize {
        self.children.push((larger, smaller));
        self.n + self.children.len() - 1
    }

    /// Two-color from `root`; leaf i gets the node sign times sgn(X_i).
    fn coloring(&self, root: usize, negative: &[bool]) -> SpinConfig {
        let mut sigma = SpinConfig::all_minus(self.n);
        let mut stack = vec![(root, true)];
        while let Some((node, plus)) = stack.pop() {
            if node < self.n {
                sigma.set(node, plus != negative[node]);
            } else {
                let (a, b) = self.children[node - self.n];
                stack.push((a, plus));
                stack.push((b, !plus));
            }
        }
        sigma
    }
}

fn ldm_in<T: Scalar>(w: &[T]) -> (T, SpinConfig) {
    let n = w.len();
    let negative: Vec<bool> = w.iter().map(|x| x.cmp_total(&T::ZERO) == Ordering::Less).collect();
    let mut heap: BinaryHeap<Item<T>> = w
        .iter()
        .enumerate()
        .map(|(i, &x)| Item {
            value: x.abs(),
            key: i,
            node: i,
        })
        .collect();
    let mut tree = Tree::new(n);
    while heap.len() > 1 {
        let a = heap.pop().unwrap();
        let b = heap.pop().unwrap();
        let node = tree.join(a.node, b.node);
        heap.push(Item {
            value: a.value - b.value,
            key: a.key,
            node,
        });
    }
    let last = heap.pop().expect("nonempty instance");
    (last.value, tree.coloring(last.node, &negative))
}

fn pdm_in<T: Scalar>(w: &[T]) -> (T, SpinConfig) {
    let n = w.len();
    let negative: Vec<bool> = w.iter().map(|x| x.cmp_total(&T::ZERO) == Ordering::Less).collect();
    let mut items: Vec<Item<T>> = w
        .iter()
        .enumerate()
        .map(|(i, &x)| Item {
            value: x.abs(),
            key: i,
            node: i,
        })
        .collect();
    let mut tree = Tree::new(n);
    while items.len() > 1 {
        items.sort_by(|a, b| b.priority(a));
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut pairs = items.chunks_exact(2);
        for pair in &mut pairs {
            let (a, b) = (pair[0], pair[1]);
            next.push(Item {
                value: a.value - b.value,
                key: a.key,
                node: tree.join(a.node, b.node),
            });
        }
        next.extend_from_slice(pairs.remainder());
        items = next;
    }
    (items[0].value, tree.coloring(items[0].node, &negative))
}

fn record(x: &Instance, run: impl Fn(Weights<'_>) -> Outcome) -> EnergyRecord {
    match run(x.view()) {
        Outcome::Float(v, s) => EnergyRecord::from_float(s, v),
        Outcome::Int(v, s, bits) => EnergyRecord::from_int(s, v, bits),
    }
}

enum Outcome {
    Float(f64, SpinConfig),
    Int(i128, SpinConfig, u32),
}

/// Largest differencing method: difference the two largest items until one
/// remains; that item is the reported discrepancy.
pub fn solve_ldm(x: &Instance) -> Result<EnergyRecord> {
    Ok(record(x, |w| match w {
        Weights::Float(v) => {
            let (r, s) = ldm_in(v);
            Outcome::Float(r, s)
        }
        Weights::Int { values, bits } => {
            let (r, s) = ldm_in(values);
            Outcome::Int(r, s, bits)
        }
    }))
}

/// Paired differencing method: each pass sorts descending and differences
/// items (1,2), (3,4), …; an odd leftover carries to the next pass.
pub fn solve_pdm(x: &Instance) -> Result<EnergyRecord> {
    Ok(record(x, |w| match w {
        Weights::Float(v) => {
            let (r, s) = pdm_in(v);
            Outcome::Float(r, s)
        }
        Weights::Int { values, bits } => {
            let (r, s) = pdm_in(values);
            Outcome::Int(r, s, bits)
        }
    }))
}
