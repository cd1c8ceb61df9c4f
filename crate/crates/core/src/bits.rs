//! Fixed-length binary vectors.
//!
//! Position 0 is the first symbol (`m1` for messages, `c1` for codewords).
//! The packed `u64` form used throughout the crate puts position `i` at bit `i`.

use std::fmt;
use std::ops::BitXor;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest vector length that fits the packed representation.
pub const MAX_BITS: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    bits: Vec<u8>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { bits: vec![0; len] }
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::invalid(format!("bit value {b} is not 0 or 1")));
        }
        Ok(BitVector {
            bits: bits.to_vec(),
        })
    }

    /// Unpacks the low `len` bits of `mask`, bit `i` becoming position `i`.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "length {len} exceeds {MAX_BITS}");
        BitVector {
            bits: (0..len).map(|i| ((mask >> i) & 1) as u8).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.bits.len() <= MAX_BITS);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = u8::from(value);
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len(), other.len());
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        assert_eq!(
            self.len(),
            rhs.len(),
            "xor of vectors with different lengths"
        );
        BitVector {
            bits: self
                .bits
                .iter()
                .zip(&rhs.bits)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::invalid("empty bit string"));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::invalid(format!(
                    "bit string `{s}` contains `{other}`"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(BitVector { bits })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl Serialize for BitVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[inline]
pub(crate) fn parity(word: u64) -> u8 {
    (word.count_ones() & 1) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_prints() {
        let v: BitVector = "01100110".parse().unwrap();
        assert_eq!(v.len(), 8);
        assert_eq!(v.to_string(), "01100110");
        assert_eq!(v.weight(), 4);
        assert_eq!(v.get(1), 1);
    }

    #[test]
    fn rejects_non_binary() {
        assert!("0120".parse::<BitVector>().is_err());
        assert!("".parse::<BitVector>().is_err());
        assert!(BitVector::from_bits(&[0, 2]).is_err());
    }

    #[test]
    fn mask_layout_is_position_major() {
        let v: BitVector = "1011".parse().unwrap();
        assert_eq!(v.to_mask(), 0b1101);
    }

    proptest! {
        #[test]
        fn mask_round_trip(mask in any::<u64>(), len in 1usize..=64) {
            let truncated = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
            let v = BitVector::from_mask(mask, len);
            prop_assert_eq!(v.to_mask(), truncated);
            prop_assert!(v.as_slice().iter().all(|&b| b <= 1));
        }

        #[test]
        fn self_xor_is_zero(bits in proptest::collection::vec(0u8..=1, 1..40)) {
            let v = BitVector::from_bits(&bits).unwrap();
            prop_assert_eq!(&v ^ &v, BitVector::zeros(bits.len()));
        }
    }
}
