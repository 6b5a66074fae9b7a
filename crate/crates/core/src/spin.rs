//! Sign vectors σ ∈ {−1, +1}ⁿ stored as bitsets (bit i set ⇔ σ_i = +1).

use crate::error::{NppError, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    n: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl SpinConfig {
    /// All spins +1.
    pub fn all_plus(n: usize) -> Self {
        let mut words = vec![u64::MAX; word_count(n)];
        if n % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        Self { n, words }
    }

    pub fn all_minus(n: usize) -> Self {
        Self {
            n,
            words: vec![0; word_count(n)],
        }
    }

    /// Low `n` bits of `mask`; requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "from_mask needs n <= 64");
        let keep = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let words = if n == 0 { Vec::new() } else { vec![mask & keep] };
        Self { n, words }
    }

    /// The bitset as a single word; `None` when `n > 64`.
    pub fn as_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let mut s = Self::all_minus(signs.len());
        for (i, &v) in signs.iter().enumerate() {
            match v {
                1 => s.set(i, true),
                -1 => {}
                _ => return Err(NppError::invalid(format!("spin {i} is {v}, expected ±1"))),
            }
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `true` iff σ_i = +1.
    #[inline]
    pub fn is_plus(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// σ_i as ±1.
    #[inline]
    pub fn sign(&self, i: usize) -> i8 {
        if self.is_plus(i) {
            1
        } else {
            -1
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, plus: bool) {
        debug_assert!(i < self.n);
        let bit = 1u64 << (i % 64);
        if plus {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut s = self.clone();
        s.flip(i);
        s
    }

    pub fn negated(&self) -> Self {
        let mut s = self.clone();
        for w in &mut s.words {
            *w = !*w;
        }
        s.clear_tail();
        s
    }

    fn clear_tail(&mut self) {
        if self.n % 64 != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (self.n % 64)) - 1;
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.n == 0 || self.is_plus(0)
    }

    /// Representative of {σ, −σ} with σ₁ = +1.
    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            self.clone()
        } else {
            self.negated()
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.n).map(|i| self.sign(i)).collect()
    }

    pub fn count_plus(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming distance; panics on length mismatch.
    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.n, other.n, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// ⟨σ, σ′⟩ = n − 2·d_H.
    pub fn inner(&self, other: &Self) -> i64 {
        self.n as i64 - 2 * self.hamming(other) as i64
    }

    /// Hex encoding of Σ_{σ_i=+1} 2^i, most significant digit first, padded
    /// to ⌈n/4⌉ digits.
    pub fn to_hex(&self) -> String {
        let digits = self.n.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let bit = d * 4;
            let word = self.words[bit / 64];
            let nibble = (word >> (bit % 64)) & 0xF;
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        let digits = n.div_ceil(4);
        if hex.len() != digits {
            return Err(NppError::invalid(format!(
                "hex spin string has {} digits, expected {digits} for n = {n}",
                hex.len()
            )));
        }
        let mut s = Self::all_minus(n);
        for (pos, ch) in hex.chars().enumerate() {
            let nib = ch
                .to_digit(16)
                .ok_or_else(|| NppError::invalid(format!("bad hex digit {ch:?}")))?
                as u64;
            let bit = (digits - 1 - pos) * 4;
            s.words[bit / 64] |= nib << (bit % 64);
        }
        let before = s.words.clone();
        s.clear_tail();
        if before != s.words {
            return Err(NppError::invalid("hex spin string sets bits beyond n"));
        }
        Ok(s)
    }

    /// Index-order comparison with −1 < +1 (σ₁ most significant).
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        for i in 0..self.n.min(other.n) {
            match self.is_plus(i).cmp(&other.is_plus(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.n.cmp(&other.n)
    }
}

impl fmt::Debug for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfig(")?;
        for i in 0..self.n {
            f.write_str(if self.is_plus(i) { "+" } else { "-" })?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
struct SpinRepr {
    n: usize,
    hex: String,
}

impl Serialize for SpinConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpinRepr {
            n: self.n,
            hex: self.to_hex(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpinConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SpinRepr::deserialize(d)?;
        SpinConfig::from_hex(r.n, &r.hex).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn negation_flips_every_bit_and_keeps_length() {
        let s = SpinConfig::from_signs(&[1, -1, -1, 1, 1]).unwrap();
        let t = s.negated();
        assert_eq!(t.signs(), vec![-1, 1, 1, -1, -1]);
        assert_eq!(t.negated(), s);
        assert_eq!(s.hamming(&t), 5);
    }

    #[test]
    fn canonical_has_first_spin_plus() {
        let s = SpinConfig::from_signs(&[-1, 1, 1]).unwrap();
        assert!(!s.is_canonical());
        assert_eq!(s.canonical().signs(), vec![1, -1, -1]);
    }

    #[test]
    fn hex_encoding_is_bit_index_little_endian() {
        let s = SpinConfig::from_signs(&[1, -1, -1, -1, 1]).unwrap();
        assert_eq!(s.to_hex(), "11");
        assert_eq!(SpinConfig::from_signs(&[1, 1, 1, 1]).unwrap().to_hex(), "f");
    }

    #[test]
    fn from_hex_rejects_bits_past_n() {
        assert!(SpinConfig::from_hex(3, "f").is_err());
        assert!(SpinConfig::from_hex(3, "7").is_ok());
    }

    proptest! {
        #[test]
        fn hex_roundtrip(signs in prop::collection::vec(prop::bool::ANY, 0..200)) {
            let signs: Vec<i8> = signs.iter().map(|&b| if b { 1 } else { -1 }).collect();
            let s = SpinConfig::from_signs(&signs).unwrap();
            let back = SpinConfig::from_hex(s.len(), &s.to_hex()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn inner_product_matches_signs(a in prop::collection::vec(prop::bool::ANY, 1..130),
                                       seed in any::<u64>()) {
            let n = a.len();
            let sa: Vec<i8> = a.iter().map(|&b| if b { 1 } else { -1 }).collect();
            let sb: Vec<i8> = (0..n).map(|i| if (crate::rng::mix64(seed ^ i as u64) & 1) == 1 { 1 } else { -1 }).collect();
            let x = SpinConfig::from_signs(&sa).unwrap();
            let y = SpinConfig::from_signs(&sb).unwrap();
            let direct: i64 = sa.iter().zip(&sb).map(|(&p, &q)| (p as i64) * (q as i64)).sum();
            prop_assert_eq!(x.inner(&y), direct);
            prop_assert_eq!((x.inner(&y) - n as i64).rem_euclid(2), 0);
        }
    }
}
