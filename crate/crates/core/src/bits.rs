//! Bit strings and the single bit/byte packing convention used on every wire.
//!
//! Bits are kept in *written order*: index 0 is the first bit of a
//! concatenation such as `α_1 || α_2 || … || α_n || signal`, so the signal bit
//! of a garbled value is the last element. Packing into bytes is
//! little-endian within each byte: bit `i` of the string lands in byte
//! `i / 8` at position `i % 8`.

use std::fmt;
use std::ops::{BitXor, BitXorAssign, Range};

use rand::RngCore;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R, len: usize) -> Self {
        let mut bytes = vec![0u8; len.div_ceil(8)];
        rng.fill_bytes(&mut bytes);
        Self::from_bytes(&bytes, len)
    }

    /// Unpacks the first `len` bits of `bytes`.
    ///
    /// Panics if `bytes` is too short.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Self {
        assert!(bytes.len() * 8 >= len, "{} bytes cannot hold {len} bits", bytes.len());
        Self { bits: (0..len).map(|i| (bytes[i / 8] >> (i % 8)) & 1 == 1).collect() }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        pack_bits(&self.bits)
    }

    /// The low `len` bits of `value`, least significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        Self { bits: (0..len).map(|i| i < 64 && (value >> i) & 1 == 1).collect() }
    }

    /// Reads the string as an unsigned integer, least significant bit first.
    pub fn to_u64(&self) -> u64 {
        bits_to_u64(&self.bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] ^= true;
    }

    /// Last bit; for a garbled value this is the signal bit.
    pub fn lsb(&self) -> bool {
        *self.bits.last().expect("empty bit string has no LSB")
    }

    pub fn slice(&self, range: Range<usize>) -> BitString {
        Self { bits: self.bits[range].to_vec() }
    }

    pub fn push(&mut self, b: bool) {
        self.bits.push(b);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a BitString>>(parts: I) -> BitString {
        let mut out = BitString::default();
        for p in parts {
            out.extend_from(p);
        }
        out
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(self.len(), other.len());
        self.iter().zip(other.iter()).filter(|(a, b)| a != b).count()
    }
}

impl BitXorAssign<&BitString> for BitString {
    fn bitxor_assign(&mut self, rhs: &BitString) {
        assert_eq!(self.len(), rhs.len(), "xor of unequal-length bit strings");
        for (a, b) in self.bits.iter_mut().zip(rhs.bits.iter()) {
            *a ^= *b;
        }
    }
}

impl BitXor<&BitString> for &BitString {
    type Output = BitString;

    fn bitxor(self, rhs: &BitString) -> BitString {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        Self { bits: iter.into_iter().collect() }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("BitString(")?;
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn pack_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            out[i / 8] |= 1 << (i % 8);
        }
    }
    out
}

pub fn bits_to_u64(bits: &[bool]) -> u64 {
    bits.iter().take(64).enumerate().fold(0, |acc, (i, &b)| acc | ((b as u64) << i))
}

pub fn u64_to_bits(value: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| i < 64 && (value >> i) & 1 == 1).collect()
}
