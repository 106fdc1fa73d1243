//! The self-delimiting core code.
//!
//! A core is a non-empty list of object ids. Each element is written as a
//! continuation bit `1` followed by the Elias-gamma code of `id + 1`; a
//! single `0` terminates the list. Gamma codes are `⌊log2 m⌋` zeros followed
//! by the binary digits of `m`, so element ids cost `2⌊log2(id+1)⌋ + 2` bits
//! including the continuation bit.

use super::bits::BitString;
use super::{ObjectSet, Universe};
use crate::error::{Error, NonHalting, Result};

/// A core expression: the listed ids, duplicates allowed, order significant
/// in the encoding even though the denoted set ignores both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreExpr {
    ids: Vec<u64>,
}

impl CoreExpr {
    pub fn new<I: Into<Vec<u64>>>(ids: I) -> Result<Self> {
        let ids = ids.into();
        if ids.is_empty() {
            return Err(Error::EmptyCore);
        }
        Ok(CoreExpr { ids })
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    /// The denoted set; ids must name objects of the universe.
    pub fn evaluate(&self, universe: &Universe) -> Result<ObjectSet> {
        let mut out = ObjectSet::EMPTY;
        for &id in &self.ids {
            if id >= u64::from(universe.size()) {
                return Err(NonHalting::UnknownObject(id).into());
            }
            out.insert(id as u32);
        }
        Ok(out)
    }

    /// Encoded length in bits without materializing the encoding.
    pub fn encoded_len(&self) -> u32 {
        self.ids.iter().map(|&id| element_cost(id)).sum::<u32>() + 1
    }
}

/// Bits an element contributes: continuation bit plus gamma code of `id + 1`.
pub fn element_cost(id: u64) -> u32 {
    2 * (64 - (id + 1).leading_zeros() - 1) + 2
}

fn push_gamma(out: &mut BitString, m: u64) -> Result<()> {
    debug_assert!(m >= 1);
    let width = 64 - m.leading_zeros();
    for _ in 0..width - 1 {
        out.push(false)?;
    }
    for i in (0..width).rev() {
        out.push(m >> i & 1 == 1)?;
    }
    Ok(())
}

/// Encodes a core expression; inverse of [`decode_core`].
pub fn encode_core(expr: &CoreExpr) -> Result<BitString> {
    let mut out = BitString::empty();
    for &id in expr.ids() {
        out.push(true)?;
        push_gamma(&mut out, id + 1)?;
    }
    out.push(false)?;
    Ok(out)
}

/// Decodes one complete core from the front of `bits`.
///
/// Returns the expression and the number of bits consumed; callers decide
/// what trailing bits mean. Truncated or empty-list streams are non-halting.
pub fn decode_core(bits: &BitString) -> Result<(CoreExpr, u32)> {
    let mut pos = 0u32;
    let mut ids = Vec::new();
    loop {
        if pos >= bits.len() {
            return Err(NonHalting::Truncated.into());
        }
        let cont = bits.get(pos);
        pos += 1;
        if !cont {
            break;
        }
        let mut zeros = 0u32;
        while pos < bits.len() && !bits.get(pos) {
            zeros += 1;
            pos += 1;
        }
        if pos + zeros + 1 > bits.len() {
            return Err(NonHalting::Truncated.into());
        }
        let mut m = 0u64;
        for _ in 0..zeros + 1 {
            m = m << 1 | u64::from(bits.get(pos));
            pos += 1;
        }
        ids.push(m - 1);
    }
    if ids.is_empty() {
        return Err(NonHalting::EmptyOutput.into());
    }
    Ok((CoreExpr { ids }, pos))
}
