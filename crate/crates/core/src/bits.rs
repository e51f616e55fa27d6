//! Fixed-length bit strings with 1-based, most-significant-first indexing.
//!
//! Bit 1 is the most significant bit; the unsigned value of an n-bit string is
//! sum over i of bits[i] * 2^(n-i). Bits are packed into u64 words MSB-first so
//! that ranged operations (inner products, slice comparisons) run word-at-a-time.

use std::fmt;

use num_bigint::BigUint;

use crate::coins::CoinSource;

/// An immutable bit string of length >= 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    /// Bit i (1-based) lives in words[(i-1)/64] at position 63-((i-1)%64).
    /// Unused trailing positions of the last word are always zero.
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    /// Builds from a slice of 0/1 values, index 0 = most significant bit.
    pub fn from_bits(bits: &[u8]) -> Self {
        assert!(!bits.is_empty(), "BitString length must be >= 1");
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (idx, &b) in bits.iter().enumerate() {
            assert!(b <= 1, "bit values must be 0 or 1, got {b}");
            if b == 1 {
                words[idx / 64] |= 1u64 << (63 - (idx % 64));
            }
        }
        BitString { words, len: bits.len() }
    }

    /// Parses a string of '0'/'1' characters.
    pub fn parse(s: &str) -> Result<Self, String> {
        if s.is_empty() {
            return Err("bit string must be non-empty".to_string());
        }
        let mut bits = Vec::with_capacity(s.len());
        for (pos, ch) in s.chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return Err(format!("invalid bit character {ch:?} at position {}", pos + 1)),
            }
        }
        Ok(BitString::from_bits(&bits))
    }

    /// The n least significant bits of `value`, as an n-bit string (n <= 64).
    pub fn from_u64(value: u64, n: usize) -> Self {
        assert!((1..=64).contains(&n), "from_u64 requires 1 <= n <= 64");
        if n < 64 {
            assert!(value < (1u64 << n), "value {value} does not fit in {n} bits");
        }
        let word = if n == 64 { value } else { value << (64 - n) };
        BitString { words: vec![word], len: n }
    }

    /// Fixed-width big-endian encoding of an unsigned big integer.
    pub fn from_biguint(value: &BigUint, width: usize) -> Self {
        assert!(width >= 1, "width must be >= 1");
        assert!(value.bits() as usize <= width, "value does not fit in {width} bits");
        let mut bits = vec![0u8; width];
        for (i, bit) in bits.iter_mut().enumerate() {
            if value.bit((width - 1 - i) as u64) {
                *bit = 1;
            }
        }
        BitString::from_bits(&bits)
    }

    /// A fresh uniformly random n-bit string drawn from `coins`.
    pub fn random(n: usize, coins: &mut impl CoinSource) -> Self {
        assert!(n >= 1);
        let mut words = vec![0u64; n.div_ceil(64)];
        let mut remaining = n;
        for word in words.iter_mut() {
            let take = remaining.min(64) as u32;
            *word = coins.draw_word(take);
            remaining -= take as usize;
        }
        BitString { words, len: n }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    /// Bit i, 1-based, 1 = most significant.
    pub fn get(&self, i: usize) -> u8 {
        assert!((1..=self.len).contains(&i), "bit index {i} out of range 1..={}", self.len);
        ((self.words[(i - 1) / 64] >> (63 - ((i - 1) % 64))) & 1) as u8
    }

    /// 64 bits starting at 0-based position `start`, zero-padded past the end.
    pub(crate) fn extract_word(&self, start: usize) -> u64 {
        let w = start / 64;
        let off = start % 64;
        let lo = self.words.get(w).copied().unwrap_or(0);
        if off == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo << off) | (hi >> (64 - off))
        }
    }

    /// Exact equality of x[lo..=hi] and y[lo..=hi] (1-based, inclusive).
    pub fn range_eq(x: &BitString, y: &BitString, lo: usize, hi: usize) -> bool {
        assert!(1 <= lo && lo <= hi && hi <= x.len && hi <= y.len);
        let width = hi - lo + 1;
        let start = lo - 1;
        let mut done = 0;
        while done < width {
            let chunk = (width - done).min(64) as u32;
            let mask = if chunk == 64 { !0u64 } else { !0u64 << (64 - chunk) };
            if (x.extract_word(start + done) ^ y.extract_word(start + done)) & mask != 0 {
                return false;
            }
            done += chunk as usize;
        }
        true
    }

    /// Unsigned integer comparison x > y (same length required).
    pub fn unsigned_gt(x: &BitString, y: &BitString) -> bool {
        assert_eq!(x.len, y.len);
        // MSB-first packing makes lexicographic word order equal numeric order.
        x.words > y.words
    }

    /// 1-based index of the most significant differing bit, if any.
    pub fn first_diff(x: &BitString, y: &BitString) -> Option<usize> {
        assert_eq!(x.len, y.len);
        for (w, (&xw, &yw)) in x.words.iter().zip(&y.words).enumerate() {
            let d = xw ^ yw;
            if d != 0 {
                return Some(w * 64 + d.leading_zeros() as usize + 1);
            }
        }
        None
    }

    pub fn to_biguint(&self) -> BigUint {
        let mut v = BigUint::ZERO;
        for i in 1..=self.len {
            if self.get(i) == 1 {
                v.set_bit((self.len - i) as u64, true);
            }
        }
        v
    }

    /// Unsigned value for strings of at most 64 bits.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64);
        if self.len == 64 {
            self.words[0]
        } else {
            self.words[0] >> (64 - self.len)
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.len {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}
