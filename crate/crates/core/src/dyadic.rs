//! Binary words and the dyadic intervals `[m/2^k, (m+1)/2^k)` they name.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cf::RatInterval;
use crate::error::{Error, Result};

/// A finite binary string; bit `i` is `true` for `1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DyadicWord {
    bits: Vec<bool>,
}

impl DyadicWord {
    pub fn empty() -> Self {
        DyadicWord { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        DyadicWord { bits }
    }

    /// Parse a string of `0`/`1` characters (`λ` or empty for the empty word).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "λ" {
            return Ok(DyadicWord::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("bad bit {c:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(DyadicWord::from_bits)
    }

    /// The word of length `k` naming `[m/2^k, (m+1)/2^k)`. Panics if
    /// `m` is out of range.
    pub fn from_index(m: &BigInt, k: usize) -> Self {
        assert!(*m >= BigInt::zero() && *m < (BigInt::one() << k), "index out of range");
        let bits = (0..k).map(|i| m.bit((k - 1 - i) as u64)).collect();
        DyadicWord { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `m` in `[m/2^k, (m+1)/2^k)`.
    pub fn index(&self) -> BigInt {
        let mut m = BigInt::zero();
        for &b in &self.bits {
            m <<= 1;
            if b {
                m += 1;
            }
        }
        m
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.index(), BigInt::one() << self.len())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.index() + 1, BigInt::one() << self.len())
    }

    /// `[m/2^k, (m+1)/2^k)`.
    pub fn interval(&self) -> RatInterval {
        RatInterval::half_open(self.lo(), self.hi())
    }

    /// Exact length `2^{-|w|}`.
    pub fn lebesgue(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::one() << self.len())
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit);
        DyadicWord { bits }
    }

    pub fn parent(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.pop();
        DyadicWord { bits }
    }

    pub fn prefix(&self, n: usize) -> Self {
        DyadicWord { bits: self.bits[..n].to_vec() }
    }

    /// `w` followed by `n` copies of `bit`.
    pub fn extend(&self, bit: bool, n: usize) -> Self {
        let mut bits = self.bits.clone();
        bits.extend(std::iter::repeat_n(bit, n));
        DyadicWord { bits }
    }

    pub fn is_prefix_of(&self, other: &DyadicWord) -> bool {
        self.len() <= other.len() && self.bits[..] == other.bits[..self.len()]
    }

    pub fn is_proper_prefix_of(&self, other: &DyadicWord) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    pub fn is_all_zeros(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    /// `w - 1`: the word just before `w` at the same length.
    pub fn prev(&self) -> Option<Self> {
        if self.is_all_zeros() {
            return None;
        }
        Some(DyadicWord::from_index(&(self.index() - 1), self.len()))
    }

    /// `w + 1`: the word just after `w` at the same length.
    pub fn next(&self) -> Option<Self> {
        if self.is_all_ones() {
            return None;
        }
        Some(DyadicWord::from_index(&(self.index() + 1), self.len()))
    }

    /// All words of length `k`, in increasing order. Panics for `k > 24`.
    pub fn all_of_length(k: usize) -> Vec<Self> {
        assert!(k <= 24, "refusing to enumerate 2^{k} words");
        (0u64..(1u64 << k)).map(|m| DyadicWord::from_index(&BigInt::from(m), k)).collect()
    }

    /// The length-`k` word whose interval contains the point `x ∈ [0, 1)`.
    pub fn containing(x: &BigRational, k: usize) -> Self {
        let scaled = x * BigRational::from_integer(BigInt::one() << k);
        let m = scaled.floor().to_integer();
        let max = (BigInt::one() << k) - 1;
        DyadicWord::from_index(&m.min(max), k)
    }
}

impl fmt::Display for DyadicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            return write!(f, "λ");
        }
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for DyadicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for DyadicWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DyadicWord::parse(s)
    }
}

impl Serialize for DyadicWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }
}

impl<'de> Deserialize<'de> for DyadicWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        DyadicWord::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> DyadicWord {
        DyadicWord::parse(s).unwrap()
    }

    #[test]
    fn interval_and_index() {
        let x = w("011");
        assert_eq!(x.index(), BigInt::from(3));
        assert_eq!(x.lo(), BigRational::new(3.into(), 8.into()));
        assert_eq!(x.hi(), BigRational::new(1.into(), 2.into()));
        assert_eq!(x.lebesgue(), BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn neighbours() {
        assert_eq!(w("01").next(), Some(w("10")));
        assert_eq!(w("10").prev(), Some(w("01")));
        assert_eq!(w("000").prev(), None);
        assert_eq!(w("11").next(), None);
        assert_eq!(DyadicWord::empty().next(), None);
    }

    #[test]
    fn containing_point() {
        let third = BigRational::new(1.into(), 3.into());
        assert_eq!(DyadicWord::containing(&third, 3), w("010"));
        assert_eq!(DyadicWord::containing(&BigRational::one(), 2), w("11"));
    }

    #[test]
    fn serde_as_bit_string() {
        let js = serde_json::to_string(&w("0110")).unwrap();
        assert_eq!(js, "\"0110\"");
        let back: DyadicWord = serde_json::from_str(&js).unwrap();
        assert_eq!(back, w("0110"));
        assert!(DyadicWord::parse("012").is_err());
    }
}
