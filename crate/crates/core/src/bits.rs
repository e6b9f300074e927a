//! Fixed-length bit strings.
//!
//! Bits are packed most-significant-first into 64-bit words: bit 0 is the
//! top bit of word 0. Unused bits of the last word are always zero, so word
//! equality is string equality. When a string of at most 64 bits is read as
//! an integer (see [`BitString::to_u64`]), bit 0 is the most significant bit,
//! which makes numeric order coincide with lexicographic order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            len,
            words: vec![u64::MAX; word_count(len)],
        };
        s.clear_tail();
        s
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i, true);
            }
        }
        s
    }

    /// The `len`-bit string whose integer value (bit 0 most significant) is
    /// `value`. Panics if `len > 64` or `value` does not fit.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 needs len <= 64");
        assert!(len == 64 || value >> len == 0, "value {value} does not fit in {len} bits");
        let mut words = vec![0; word_count(len)];
        if len > 0 {
            words[0] = value << (64 - len);
        }
        Self { len, words }
    }

    /// Integer value with bit 0 as the most significant bit.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= 64, "to_u64 needs len <= 64");
        if self.len == 0 {
            0
        } else {
            self.words[0] >> (64 - self.len)
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (63 - i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// First `q` bits.
    pub fn prefix(&self, q: usize) -> Self {
        assert!(q <= self.len, "prefix {q} longer than string {}", self.len);
        self.slice(0, q)
    }

    /// Bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = Self::zeros(len);
        if start.is_multiple_of(64) {
            let first = start / 64;
            let n = word_count(len);
            out.words.copy_from_slice(&self.words[first..first + n]);
            out.clear_tail();
            return out;
        }
        let shift = start % 64;
        let first = start / 64;
        for (w, slot) in out.words.iter_mut().enumerate() {
            let hi = self.words[first + w] << shift;
            let lo = self
                .words
                .get(first + w + 1)
                .map_or(0, |&next| next >> (64 - shift));
            *slot = hi | lo;
        }
        out.clear_tail();
        out
    }

    /// `self ‖ other`.
    pub fn concat(&self, other: &BitString) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        let shift = self.len % 64;
        let base = self.len / 64;
        for (w, &word) in other.words.iter().enumerate() {
            if shift == 0 {
                out.words[base + w] = word;
            } else {
                out.words[base + w] |= word >> shift;
                if let Some(slot) = out.words.get_mut(base + w + 1) {
                    *slot |= word << (64 - shift);
                }
            }
        }
        out.clear_tail();
        out
    }

    /// Concatenation of many strings, in order.
    pub fn concat_all<'a>(parts: impl IntoIterator<Item = &'a BitString>) -> Self {
        parts
            .into_iter()
            .fold(BitString::zeros(0), |acc, p| acc.concat(p))
    }

    /// Prepend zeros until the string has length `len`.
    pub fn pad_front(&self, len: usize) -> Self {
        assert!(len >= self.len, "cannot pad {} bits down to {len}", self.len);
        Self::zeros(len - self.len).concat(self)
    }

    pub fn xor(&self, other: &BitString) -> Self {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitString) -> bool {
        assert_eq!(self.len, other.len, "dot of unequal lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn hamming_distance(&self, other: &BitString) -> usize {
        assert_eq!(self.len, other.len, "distance of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn complement(&self) -> Self {
        let mut out = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_tail();
        out
    }

    /// Packed hex of the bits, most significant first, last nibble zero padded.
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut s = String::with_capacity(nibbles);
        for k in 0..nibbles {
            let word = self.words[k / 16];
            let nib = (word >> (60 - 4 * (k % 16))) & 0xf;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX << (64 - r);
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.len, self.to_hex())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(")?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses `<length>:<hex>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |message: String| Error::Parse { line: 1, message };
        let (len_part, hex) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| bad(format!("bit string `{s}` is not `<length>:<hex>`")))?;
        let len: usize = len_part
            .parse()
            .map_err(|_| bad(format!("bad bit length `{len_part}`")))?;
        if hex.len() != len.div_ceil(4) {
            return Err(bad(format!(
                "length {len} needs {} hex digits, got {}",
                len.div_ceil(4),
                hex.len()
            )));
        }
        let mut out = BitString::zeros(len);
        for (k, c) in hex.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| bad(format!("bad hex digit `{c}`")))? as u64;
            out.words[k / 16] |= nib << (60 - 4 * (k % 16));
        }
        let tail = out.words.clone();
        out.clear_tail();
        if out.words != tail {
            return Err(bad("nonzero padding bits in final nibble".into()));
        }
        Ok(out)
    }
}
