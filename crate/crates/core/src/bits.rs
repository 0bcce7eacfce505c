//! Bit strings and fixed-width integer packing for protocol payloads.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid bit string {0:?}: only '0' and '1' are allowed")]
pub struct ParseBitsError(pub String);

/// A finite bit string. Text form is `'0'/'1'` characters, first bit first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// The `width` low bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        let mut w = BitWriter::new();
        w.uint(value, width);
        w.finish()
    }

    /// Eight bits per byte, most significant first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut w = BitWriter::new();
        for &b in bytes {
            w.uint(u64::from(b), 8);
        }
        w.finish()
    }

    /// Inverse of [`BitString::from_bytes`]; `None` if the length is not a multiple of 8.
    pub fn to_bytes(&self) -> Option<Vec<u8>> {
        if !self.0.len().is_multiple_of(8) {
            return None;
        }
        let mut r = BitReader::new(self);
        (0..self.0.len() / 8).map(|_| r.uint(8).map(|v| v as u8)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Zero-based access.
    pub fn get(&self, idx: usize) -> Option<bool> {
        self.0.get(idx).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Value of the whole string read as an unsigned integer (at most 64 bits).
    pub fn to_uint(&self) -> Option<u64> {
        BitReader::new(self).uint(self.len())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseBitsError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Number of bits needed to write every value in `0..=max_value` (at least 1).
pub fn width_for(max_value: u64) -> usize {
    (64 - max_value.leading_zeros() as usize).max(1)
}

/// `⌈log₂ x⌉` for `x ≥ 1`.
pub fn ceil_log2(x: u64) -> usize {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as usize
    }
}

#[derive(Default)]
pub struct BitWriter {
    out: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bit(&mut self, b: bool) -> &mut Self {
        self.out.push(b);
        self
    }

    pub fn uint(&mut self, value: u64, width: usize) -> &mut Self {
        debug_assert!(width >= 64 || value >> width == 0, "{value} does not fit in {width} bits");
        for k in (0..width).rev() {
            self.out.push(k < 64 && (value >> k) & 1 == 1);
        }
        self
    }

    pub fn bits(&mut self, s: &BitString) -> &mut Self {
        self.out.extend_from_slice(s.bits());
        self
    }

    pub fn finish(&mut self) -> BitString {
        BitString(std::mem::take(&mut self.out))
    }
}

pub struct BitReader<'a> {
    src: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(s: &'a BitString) -> Self {
        Self { src: s.bits(), pos: 0 }
    }

    pub fn bit(&mut self) -> Option<bool> {
        let b = *self.src.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn uint(&mut self, width: usize) -> Option<u64> {
        if width > 64 || self.pos + width > self.src.len() {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | u64::from(self.src[self.pos]);
            self.pos += 1;
        }
        Some(v)
    }

    pub fn take(&mut self, len: usize) -> Option<BitString> {
        if self.pos + len > self.src.len() {
            return None;
        }
        let s = BitString(self.src[self.pos..self.pos + len].to_vec());
        self.pos += len;
        Some(s)
    }

    pub fn remaining(&self) -> usize {
        self.src.len() - self.pos
    }
}
