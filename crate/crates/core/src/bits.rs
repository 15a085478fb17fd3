//! Bit-string convention.
//!
//! Variable `x_k` is bit `k` (least significant) of the integer index.
//! Strings are printed most-significant bit first, so `x_{n-1} ... x_1 x_0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A candidate solution: an n-bit assignment stored as an integer index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BitString(pub u64);

impl BitString {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn bit(self, k: usize) -> bool {
        (self.0 >> k) & 1 == 1
    }

    #[inline]
    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn hamming(self, other: BitString) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    #[inline]
    pub fn flip(self, k: usize) -> BitString {
        BitString(self.0 ^ (1 << k))
    }

    /// Indices of the set bits, ascending.
    pub fn ones(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..64).filter(move |k| (bits >> k) & 1 == 1)
    }

    pub fn from_ones(ones: impl IntoIterator<Item = usize>) -> BitString {
        BitString(ones.into_iter().fold(0, |acc, k| acc | (1 << k)))
    }

    /// Renders `n` bits, most significant first.
    pub fn to_bits(self, n: usize) -> String {
        (0..n).rev().map(|k| if self.bit(k) { '1' } else { '0' }).collect()
    }

    /// Parses a most-significant-first string of `0`/`1`.
    pub fn parse(s: &str) -> Result<BitString> {
        if s.is_empty() || s.len() > 64 {
            return Err(Error::InvalidInstance(format!("bad bit string length: {s:?}")));
        }
        s.chars().try_fold(0u64, |acc, c| match c {
            '0' => Ok(acc << 1),
            '1' => Ok((acc << 1) | 1),
            _ => Err(Error::InvalidInstance(format!("bad bit string: {s:?}"))),
        })
        .map(BitString)
    }

    pub fn display(self, n: usize) -> Bits {
        Bits { value: self, n }
    }
}

/// Fixed-width display adapter returned by [`BitString::display`].
pub struct Bits {
    value: BitString,
    n: usize,
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.value.to_bits(self.n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_first_printing() {
        assert_eq!(BitString(0b0111).to_bits(4), "0111");
        assert_eq!(BitString(1).to_bits(3), "001");
        assert!(BitString(0b0111).bit(0));
        assert!(!BitString(0b0111).bit(3));
    }

    #[test]
    fn parse_inverts_to_bits() {
        for x in 0..64u64 {
            let b = BitString(x);
            assert_eq!(BitString::parse(&b.to_bits(6)).unwrap(), b);
        }
        assert!(BitString::parse("01a").is_err());
        assert!(BitString::parse("").is_err());
    }

    #[test]
    fn ones_round_trip() {
        let b = BitString(0b101001);
        assert_eq!(b.ones().collect::<Vec<_>>(), vec![0, 3, 5]);
        assert_eq!(BitString::from_ones([0, 3, 5]), b);
        assert_eq!(b.hamming(BitString(0b001001)), 1);
    }
}
