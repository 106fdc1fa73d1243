//! The toy regular universal machine.
//!
//! A program is a bit string `w ‖ q`. The wrapper `w = s ‖ M` ends with the
//! first occurrence of a fixed marker `M` (its prefix `s` is marker-free), so
//! the wrapper/core boundary is unique. The core `q` is a self-delimiting
//! list of object ids; running the program means decoding the core and taking
//! the set of listed objects. The wrapper carries no information: two
//! programs with the same core produce the same output.
//!
//! Cores encode each element as a continuation bit `1` followed by the
//! Elias-gamma code of `id + 1`, and end with a single `0`. The shortest
//! core is therefore `110` (the list `(0)`), and list cost grows with both
//! list length and object id, which keeps ground lengths of different
//! targets apart and produces non-trivial multiplicity spectra.

mod bits;
mod codec;
mod table;

pub use bits::BitString;
pub use codec::{decode_core, element_cost, encode_core, CoreExpr};
pub use table::{CoreRecord, DegeneracySpectrum, ProgramTable, MAX_CORE_LEN, MIN_CORE_LEN};

use std::borrow::Cow;
use std::fmt;

use crate::error::{Error, NonHalting, Result};

pub type ObjectId = u32;

/// The finite object universe: ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    n: u32,
    labels: Option<Vec<String>>,
}

impl Universe {
    pub const MIN_SIZE: u32 = 2;
    /// Subsets must fit a machine-word bitmask with headroom for exhaustive
    /// predicate counting.
    pub const MAX_SIZE: u32 = 24;

    pub fn new(n: u32) -> Result<Self> {
        if !(Self::MIN_SIZE..=Self::MAX_SIZE).contains(&n) {
            return Err(Error::UniverseSize(n));
        }
        Ok(Universe { n, labels: None })
    }

    pub fn with_labels(n: u32, labels: Vec<String>) -> Result<Self> {
        let mut u = Self::new(n)?;
        if labels.len() != n as usize {
            return Err(Error::LabelCount {
                expected: n,
                got: labels.len(),
            });
        }
        u.labels = Some(labels);
        Ok(u)
    }

    pub fn size(&self) -> u32 {
        self.n
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        id < self.n
    }

    pub fn label(&self, id: ObjectId) -> Cow<'_, str> {
        match &self.labels {
            Some(ls) if self.contains(id) => Cow::Borrowed(ls[id as usize].as_str()),
            _ => Cow::Owned(format!("{id}")),
        }
    }

    pub fn check(&self, id: ObjectId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::ObjectOutOfRange { id, n: self.n })
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjectId> {
        0..self.n
    }

    pub fn singleton(&self, id: ObjectId) -> Result<ObjectSet> {
        self.check(id)?;
        Ok(ObjectSet(1 << id))
    }

    pub fn pair(&self, x: ObjectId, y: ObjectId) -> Result<ObjectSet> {
        self.check(x)?;
        self.check(y)?;
        Ok(ObjectSet(1 << x | 1 << y))
    }

    pub fn set_from_ids(&self, ids: &[ObjectId]) -> Result<ObjectSet> {
        let mut mask = 0u32;
        for &id in ids {
            self.check(id)?;
            mask |= 1 << id;
        }
        Ok(ObjectSet(mask))
    }
}

/// A subset of the universe as a bitmask. The machine only ever *produces*
/// non-empty sets; the empty mask exists so subset algebra stays total.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ObjectSet(u32);

impl ObjectSet {
    pub const EMPTY: ObjectSet = ObjectSet(0);

    pub fn from_mask(mask: u32) -> Self {
        ObjectSet(mask)
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.0 >> id & 1 == 1
    }

    pub fn is_superset_of(&self, other: ObjectSet) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn union(&self, other: ObjectSet) -> ObjectSet {
        ObjectSet(self.0 | other.0)
    }

    pub fn insert(&mut self, id: ObjectId) {
        self.0 |= 1 << id;
    }

    pub fn ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..32).filter(move |i| self.contains(*i))
    }

    pub fn display<'a>(&'a self, universe: &'a Universe) -> impl fmt::Display + 'a {
        struct D<'a>(&'a ObjectSet, &'a Universe);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{{")?;
                for (i, id) in self.0.ids().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", self.1.label(id))?;
                }
                write!(f, "}}")
            }
        }
        D(self, universe)
    }
}

impl fmt::Display for ObjectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.ids().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// The wrapper-terminating marker.
///
/// Validation requires trivial autocorrelation: no proper non-empty suffix of
/// the marker may equal one of its prefixes. That rules out self-overlapping
/// markers like `11`, for which the first occurrence of the marker in
/// `s ‖ M` could end before the wrapper does and the parse would not be
/// unique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marker {
    bits: BitString,
}

// a marker is never empty, so `len` without `is_empty` is right here
#[allow(clippy::len_without_is_empty)]
impl Marker {
    pub fn new(bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidMarker(
                bits.to_string(),
                "must be non-empty".into(),
            ));
        }
        let h = bits.len();
        for k in 1..h {
            // suffix of length k vs prefix of length k
            if bits.suffix_from(h - k) == bits.prefix(k) {
                return Err(Error::InvalidMarker(
                    bits.to_string(),
                    format!(
                        "suffix {} equals prefix; marker overlaps itself",
                        bits.suffix_from(h - k)
                    ),
                ));
            }
        }
        Ok(Marker { bits })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Marker::new(BitString::parse(s)?)
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len(&self) -> u32 {
        self.bits.len()
    }
}

impl fmt::Display for Marker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

/// The unique wrapper/core split of a program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedProgram {
    pub wrapper: BitString,
    pub core: BitString,
    pub expr: CoreExpr,
}

impl ParsedProgram {
    /// Wrapper length `d`; the minimal wrapper is the marker itself.
    pub fn wrapper_len(&self) -> u32 {
        self.wrapper.len()
    }

    /// Reassembles the original program bit-exactly.
    pub fn reassemble(&self) -> BitString {
        self.wrapper.concat(&self.core).expect("parsed parts fit")
    }
}

/// Splits a program at the first marker occurrence and decodes the core.
///
/// Fails (as "non-halting") if the marker never occurs or if the remainder is
/// not exactly one complete core.
pub fn parse_program(program: &BitString, marker: &Marker) -> Result<ParsedProgram> {
    let h = marker.len();
    let end = program.len().checked_sub(h).ok_or(NonHalting::NoMarker)?;
    let boundary = (0..=end)
        .find(|&pos| program.matches_at(marker.bits(), pos))
        .ok_or(NonHalting::NoMarker)?
        + h;
    let wrapper = program.prefix(boundary);
    let core = program.suffix_from(boundary);
    let (expr, consumed) = decode_core(&core)?;
    if consumed != core.len() {
        return Err(NonHalting::TrailingBits(core.len() - consumed).into());
    }
    Ok(ParsedProgram {
        wrapper,
        core,
        expr,
    })
}

/// Runs a program: parse, then evaluate the core against the universe.
///
/// The output is independent of the wrapper by construction. Ids outside the
/// universe make the program non-halting, like any other parse failure.
pub fn execute(program: &BitString, universe: &Universe, marker: &Marker) -> Result<ObjectSet> {
    let parsed = parse_program(program, marker)?;
    parsed.expr.evaluate(universe)
}
