//! Exhaustive core enumeration and the derived multiplicity index.

use std::io::Write;

use super::bits::BitString;
use super::codec::{element_cost, encode_core, CoreExpr};
use super::{Marker, ObjectSet, Universe};
use crate::error::{Error, Result};
use crate::exec;

/// One enumerated core.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreRecord {
    pub bits: BitString,
    pub output: ObjectSet,
}

// cores are at least 3 bits, so `len` without `is_empty` is right here
#[allow(clippy::len_without_is_empty)]
impl CoreRecord {
    pub fn len(&self) -> u32 {
        self.bits.len()
    }
}

/// Multiplicities of cores covering a target, by excess over the ground
/// core length: `multiplicity(0)` counts shortest cores, `multiplicity(d)`
/// the alternatives exactly `d` bits longer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracySpectrum {
    pub target: ObjectSet,
    pub ground_core_len: u32,
    counts: Vec<u64>,
}

impl DegeneracySpectrum {
    pub fn ground_multiplicity(&self) -> u64 {
        self.counts[0]
    }

    pub fn multiplicity(&self, excess: u32) -> u64 {
        self.counts.get(excess as usize).copied().unwrap_or(0)
    }

    pub fn max_excess(&self) -> u32 {
        self.counts.len() as u32 - 1
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// Every core of encoded length `<= l_core`, with its output, plus query
/// methods for ground lengths and multiplicity spectra. Immutable after
/// construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct ProgramTable {
    universe: Universe,
    marker: Marker,
    l_core: u32,
    cores: Vec<CoreRecord>,
}

/// Smallest possible core: the single-element list `(0)`.
pub const MIN_CORE_LEN: u32 = 3;

/// Desk-scale guard for the enumeration bound.
pub const MAX_CORE_LEN: u32 = 40;

impl ProgramTable {
    /// Enumerates cores length by length; lengths run in parallel under the
    /// `parallel` feature and are merged in increasing order either way.
    pub fn build(universe: &Universe, marker: &Marker, l_core: u32) -> Result<Self> {
        Self::build_inner(universe, marker, l_core, false)
    }

    /// Single-threaded twin of [`ProgramTable::build`].
    pub fn build_sequential(universe: &Universe, marker: &Marker, l_core: u32) -> Result<Self> {
        Self::build_inner(universe, marker, l_core, true)
    }

    fn build_inner(universe: &Universe, marker: &Marker, l_core: u32, seq: bool) -> Result<Self> {
        if l_core > MAX_CORE_LEN {
            return Err(Error::CoreBoundTooLarge(l_core));
        }
        let lengths: Vec<u32> = (MIN_CORE_LEN..=l_core).collect();
        let gen = |i: usize| cores_of_len(universe, lengths[i]);
        let groups = if seq {
            exec::map_indexed_seq(lengths.len(), gen)
        } else {
            exec::map_indexed(lengths.len(), gen)
        };
        Ok(ProgramTable {
            universe: universe.clone(),
            marker: marker.clone(),
            l_core,
            cores: groups.concat(),
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn marker(&self) -> &Marker {
        &self.marker
    }

    pub fn core_bound(&self) -> u32 {
        self.l_core
    }

    pub fn cores(&self) -> &[CoreRecord] {
        &self.cores
    }

    /// (length, number of cores of that length), ascending, zero rows kept.
    pub fn length_histogram(&self) -> Vec<(u32, u64)> {
        let mut hist: Vec<(u32, u64)> = (MIN_CORE_LEN..=self.l_core).map(|l| (l, 0)).collect();
        for c in &self.cores {
            hist[(c.len() - MIN_CORE_LEN) as usize].1 += 1;
        }
        hist
    }

    fn check_target(&self, target: ObjectSet) -> Result<()> {
        if target.is_empty() {
            return Err(Error::EmptyTarget);
        }
        for id in target.ids() {
            self.universe.check(id)?;
        }
        Ok(())
    }

    /// Minimal core length whose output covers `target`.
    pub fn ground_core_len(&self, target: ObjectSet) -> Result<u32> {
        self.check_target(target)?;
        self.cores
            .iter()
            .filter(|c| c.output.is_superset_of(target))
            .map(|c| c.len())
            .min()
            .ok_or(Error::Unsatisfiable {
                target: target.to_string(),
                l_core: self.l_core,
            })
    }

    /// Minimal *program* length: marker length plus ground core length.
    pub fn ground_length(&self, target: ObjectSet) -> Result<u32> {
        Ok(self.marker.len() + self.ground_core_len(target)?)
    }

    /// Cores covering `target` with length exactly `len`.
    pub fn covering_count(&self, target: ObjectSet, len: u32) -> u64 {
        self.cores
            .iter()
            .filter(|c| c.len() == len && c.output.is_superset_of(target))
            .count() as u64
    }

    /// Multiplicity spectrum of `target` out to excess `max_excess`.
    ///
    /// Errors if the enumeration bound is too small to see the whole window;
    /// rebuild the table with a larger bound in that case.
    pub fn spectrum(&self, target: ObjectSet, max_excess: u32) -> Result<DegeneracySpectrum> {
        let ground = self.ground_core_len(target)?;
        if ground + max_excess > self.l_core {
            return Err(Error::WindowTooLarge {
                needed: ground + max_excess,
                l_core: self.l_core,
            });
        }
        let mut counts = vec![0u64; max_excess as usize + 1];
        for c in self
            .cores
            .iter()
            .filter(|c| c.output.is_superset_of(target))
        {
            let d = c.len() - ground;
            if d <= max_excess {
                counts[d as usize] += 1;
            }
        }
        Ok(DegeneracySpectrum {
            target,
            ground_core_len: ground,
            counts,
        })
    }

    /// CSV export: `core_bits,length,output_mask`.
    pub fn export_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "core_bits,length,output_mask")?;
        for c in &self.cores {
            writeln!(w, "{},{},{}", c.bits, c.len(), c.output.mask())?;
        }
        Ok(())
    }
}

/// All cores of exactly `len` encoded bits, in lexicographic id-list order.
fn cores_of_len(universe: &Universe, len: u32) -> Vec<CoreRecord> {
    let mut out = Vec::new();
    let Some(budget) = len.checked_sub(1) else {
        return out;
    };
    let mut stack: Vec<u64> = Vec::new();
    gen_rec(universe, budget, &mut stack, &mut out);
    out
}

fn gen_rec(universe: &Universe, budget: u32, stack: &mut Vec<u64>, out: &mut Vec<CoreRecord>) {
    if budget == 0 {
        if let Ok(expr) = CoreExpr::new(stack.clone()) {
            let bits = encode_core(&expr).expect("desk-scale cores fit");
            let output = expr.evaluate(universe).expect("ids come from the universe");
            out.push(CoreRecord { bits, output });
        }
        return;
    }
    for id in 0..u64::from(universe.size()) {
        let cost = element_cost(id);
        if cost <= budget {
            stack.push(id);
            gen_rec(universe, budget - cost, stack, out);
            stack.pop();
        }
    }
}
