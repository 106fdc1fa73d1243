//! Fixed-capacity bit strings.
//!
//! Everything at desk scale fits in a machine word: programs, wrappers and
//! cores never exceed 64 bits. Bit 0 is the leftmost bit, so `Display` and
//! `parse` read in natural order ("011" has bit 0 = 0).

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString {
    len: u8,
    bits: u64,
}

impl BitString {
    pub const MAX_LEN: u32 = 64;

    pub const fn empty() -> Self {
        BitString { len: 0, bits: 0 }
    }

    /// Parses a string of '0'/'1' characters.
    pub fn parse(s: &str) -> Result<Self> {
        let mut out = BitString::empty();
        for c in s.chars() {
            match c {
                '0' => out.push(false)?,
                '1' => out.push(true)?,
                other => return Err(Error::BadBitChar(other)),
            }
        }
        Ok(out)
    }

    pub fn len(&self) -> u32 {
        u32::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: u32) -> bool {
        debug_assert!(i < self.len());
        self.bits >> i & 1 == 1
    }

    pub fn push(&mut self, bit: bool) -> Result<()> {
        if self.len() >= Self::MAX_LEN {
            return Err(Error::BitStringOverflow);
        }
        if bit {
            self.bits |= 1 << self.len;
        }
        self.len += 1;
        Ok(())
    }

    pub fn concat(&self, tail: &BitString) -> Result<BitString> {
        if self.len() + tail.len() > Self::MAX_LEN {
            return Err(Error::BitStringOverflow);
        }
        Ok(BitString {
            len: self.len + tail.len,
            bits: self.bits | tail.bits << self.len,
        })
    }

    /// First `k` bits.
    pub fn prefix(&self, k: u32) -> BitString {
        debug_assert!(k <= self.len());
        BitString {
            len: k as u8,
            bits: if k == 64 {
                self.bits
            } else {
                self.bits & ((1u64 << k) - 1)
            },
        }
    }

    /// Bits from position `k` to the end.
    pub fn suffix_from(&self, k: u32) -> BitString {
        debug_assert!(k <= self.len());
        BitString {
            len: self.len - k as u8,
            bits: if k == 64 { 0 } else { self.bits >> k },
        }
    }

    /// Does `pat` occur starting at position `pos`?
    pub fn matches_at(&self, pat: &BitString, pos: u32) -> bool {
        if pos + pat.len() > self.len() {
            return false;
        }
        (self.bits >> pos) & ((1u64 << pat.len()) - 1) == pat.bits
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// All bit strings of exactly `len` bits, in increasing raw order.
    pub fn all_of_len(len: u32) -> impl Iterator<Item = BitString> {
        assert!(len < 35, "exhaustive bit-string scan capped at 34 bits");
        (0..1u64 << len).map(move |raw| BitString {
            len: len as u8,
            bits: raw,
        })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b\"{self}\"")
    }
}
