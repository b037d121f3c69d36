//! Finite binary strings and the length-lexicographic bijection with the naturals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A finite binary string. Ordered length-lexicographically: shorter strings
/// first, ties broken with `0 < 1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid bit character {ch:?} at offset {offset}")]
pub struct ParseBitsError {
    pub ch: char,
    pub offset: usize,
}

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// Parses `'0'`/`'1'` text. Panics on any other character; use
    /// [`FromStr`] for fallible parsing.
    pub fn lit(s: &str) -> Self {
        s.parse().expect("bit literal")
    }

    /// The `width` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, width: usize) -> Self {
        BitString((0..width).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn repeat(&self, times: usize) -> BitString {
        BitString(self.0.repeat(times))
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    /// Position of this string in the enumeration `"" , "0", "1", "00", ...`.
    ///
    /// Saturates at `u64::MAX` for strings of 64 bits or more.
    pub fn to_nat(&self) -> u64 {
        string_to_nat(self)
    }
}

/// The length-lexicographic bijection `n -> string`: `0 -> ""`, `1 -> "0"`,
/// `2 -> "1"`, `3 -> "00"`, ...
///
/// `n + 1` written in binary with its leading one removed.
pub fn nat_to_string(n: u64) -> BitString {
    let m = n as u128 + 1;
    let width = 127 - m.leading_zeros() as usize;
    BitString((0..width).rev().map(|i| (m >> i) & 1 == 1).collect())
}

/// Inverse of [`nat_to_string`]. Saturates at `u64::MAX` for strings longer
/// than 63 bits.
pub fn string_to_nat(s: &BitString) -> u64 {
    if s.len() >= 64 {
        return u64::MAX;
    }
    let m = s.0.iter().fold(1u128, |acc, &b| (acc << 1) | b as u128);
    (m - 1) as u64
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b { '1' } else { '0' }).collect();
        f.pad(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .enumerate()
            .map(|(offset, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseBitsError { ch, offset }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        BitString(iter.into_iter().collect())
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
