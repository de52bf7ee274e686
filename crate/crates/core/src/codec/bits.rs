use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Ordered sequence of bits. Multi-bit values are always written and read
/// most significant bit first.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Self(Vec::with_capacity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Option<bool> {
        self.0.get(i).copied()
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Appends the low `n` bits of `value`, MSB first.
    pub fn push_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for i in (0..n).rev() {
            self.0.push((value >> i) & 1 == 1);
        }
    }

    /// Appends each byte as 8 bits, MSB first.
    pub fn push_bytes(&mut self, bytes: &[u8]) {
        self.0.reserve(bytes.len() * 8);
        for &b in bytes {
            self.push_bits(b as u64, 8);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut s = Self::with_capacity(bytes.len() * 8);
        s.push_bytes(bytes);
        s
    }

    /// Reads `n` bits starting at `start` as an unsigned integer.
    ///
    /// Panics if the range runs past the end.
    pub fn read_uint(&self, start: usize, n: u32) -> u64 {
        self.0[start..start + n as usize]
            .iter()
            .fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    /// Packs the bits into bytes, MSB first. A trailing partial byte is
    /// zero-padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|c| {
                c.iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i)))
            })
            .collect()
    }

    pub fn slice(&self, range: Range<usize>) -> BitString {
        BitString(self.0[range].to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        Self(v)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses a string of `0`/`1`; spaces, `_` and `·` are ignored.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !matches!(c, ' ' | '_' | '·'))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("invalid bit character {other:?}"))),
            })
            .collect()
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

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 128 {
            write!(f, "BitString({self})")
        } else {
            write!(f, "BitString(len={})", self.len())
        }
    }
}
