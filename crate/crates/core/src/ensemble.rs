//! Exact equilibrium quantities over program ensembles: cutoff partition
//! functions, free energies, coupled ensembles, generalized force,
//! reversible work and its depth/diversity decomposition, Solomonoff-style
//! weights, Kraft sums, and uniform predicate counting.
//!
//! Two window conventions exist and are both exposed:
//!
//! * **per-constraint** ([`partition_function`]): each target is cut off at
//!   its own ground length plus the excess, which is the convention for the
//!   temperature-regime studies;
//! * **shared absolute** ([`partition_in_window`], [`coupled_partition`]):
//!   one absolute length bound for every term, which the coupled ensemble
//!   must use so that its state space does not depend on the coupling
//!   parameter and work theorems hold exactly.
//!
//! All sums are accumulated in log space, so large `beta` (deep
//! low-temperature runs) cannot underflow.

use crate::automaton::{effective_degeneracy, WrapperAutomaton, GROWTH_TOL};
use crate::error::{Error, Result};
use crate::machine::{ObjectId, ObjectSet, ProgramTable, Universe, MIN_CORE_LEN};
use crate::quadrature::gauss_legendre_unit;

/// Constraint coupling strength. `Hard` is the J -> infinity limit,
/// implemented as filtering rather than as a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Soft(f64),
    Hard,
}

/// Parameters of the coupled ensemble: inverse temperature, coupling
/// parameter `lambda` in [0, 1], coupling strength, and excess window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    pub beta: f64,
    pub lambda: f64,
    pub coupling: Coupling,
    pub excess: u32,
}

impl EnsembleParams {
    fn validate(&self) -> Result<()> {
        check_beta_nonnegative(self.beta)?;
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::BadSchedule(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        if let Coupling::Soft(j) = self.coupling {
            if j <= 0.0 || !j.is_finite() {
                return Err(Error::NonPositiveCoupling(j));
            }
        }
        Ok(())
    }
}

/// Coupling metadata attached to a coupled partition value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingState {
    pub partner: ObjectId,
    pub lambda: f64,
    pub coupling: Coupling,
}

/// A cutoff partition value, kept as a natural log.
///
/// `count` is the exact number of programs inside the window, which is also
/// the value of the partition at `beta = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffPartition {
    pub log_value: f64,
    pub beta: f64,
    /// Ground program length anchoring the window.
    pub ground: u32,
    /// Window width above the ground length.
    pub excess: u32,
    pub target: ObjectSet,
    pub count: u128,
    pub coupling: Option<CouplingState>,
}

impl CutoffPartition {
    /// `exp(log_value)`; may underflow to zero for very large `beta`, which
    /// is why consumers should prefer `log_value`.
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Reversible work split into the description-depth difference and the
/// residual-entropy (effective-degeneracy) term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkDecomposition {
    /// Free-energy difference, natural-log units with lengths in bits.
    pub work: f64,
    /// Ground-length difference.
    pub depth: f64,
    /// `-ln(m~_xy / m~_x) / beta` from the effective degeneracies.
    pub diversity: f64,
}

/// [`WorkDecomposition`] plus the raw window-count comparison used in the
/// high-temperature regime, where `e^{-beta W}` approaches the program-count
/// ratio of the two windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighTempCheck {
    pub decomposition: WorkDecomposition,
    /// `exp(-beta W)`, i.e. the partition ratio.
    pub boltzmann_ratio: f64,
    /// Window program-count ratio `C(x,y) / C(x)`.
    pub count_ratio: f64,
}

/// An exact Kraft sum as a dyadic rational `numerator / 2^l_total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KraftSum {
    pub numerator: u128,
    pub l_total: u32,
}

impl KraftSum {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / (1u128 << self.l_total) as f64
    }

    /// Prefix-freeness promises this never fails.
    pub fn within_bound(&self) -> bool {
        self.numerator <= 1u128 << self.l_total
    }
}

fn check_beta_nonnegative(beta: f64) -> Result<()> {
    if beta < 0.0 || !beta.is_finite() {
        return Err(Error::NonPositiveBeta(beta));
    }
    Ok(())
}

fn check_beta_positive(beta: f64) -> Result<()> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::NonPositiveBeta(beta));
    }
    Ok(())
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Program counts per excess layer: `counts[j]` is the number of programs of
/// length `ground + j` whose output covers the target, the convolution of the
/// multiplicity spectrum with the wrapper counts.
fn layer_counts(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    target: ObjectSet,
    excess: u32,
) -> Result<(u32, Vec<u128>)> {
    let spectrum = table.spectrum(target, excess)?;
    let h = aut.marker_len();
    let ground = h + spectrum.ground_core_len;
    let wrappers: Vec<u128> = (0..=excess).map(|dw| aut.wrapper_count(h + dw)).collect();
    let counts = (0..=excess)
        .map(|j| {
            (0..=j)
                .map(|dc| u128::from(spectrum.multiplicity(dc)) * wrappers[(j - dc) as usize])
                .sum()
        })
        .collect();
    Ok((ground, counts))
}

/// Partition function of `target` with a per-constraint excess window:
/// the Boltzmann sum over programs whose output covers `target` and whose
/// length is at most `ground(target) + excess`. At `beta = 0` the value is
/// the exact program count.
pub fn partition_function(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    target: ObjectSet,
    beta: f64,
    excess: u32,
) -> Result<CutoffPartition> {
    check_beta_nonnegative(beta)?;
    let (ground, counts) = layer_counts(table, aut, target, excess)?;
    let terms: Vec<f64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(j, &n)| (n as f64).ln() - beta * f64::from(ground + j as u32))
        .collect();
    Ok(CutoffPartition {
        log_value: log_sum_exp(&terms),
        beta,
        ground,
        excess,
        target,
        count: counts.iter().sum(),
        coupling: None,
    })
}

/// Partition function of `target` under a shared absolute window: the sum
/// runs over programs of length at most `window`, regardless of the target's
/// own ground length.
pub fn partition_in_window(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    target: ObjectSet,
    beta: f64,
    window: u32,
) -> Result<CutoffPartition> {
    check_beta_nonnegative(beta)?;
    let ground = table.ground_length(target)?;
    if window < ground {
        return Err(Error::Unsatisfiable {
            target: target.to_string(),
            l_core: table.core_bound(),
        });
    }
    partition_function(table, aut, target, beta, window - ground)
}

/// `F = -ln(Z) / beta`; undefined at `beta = 0`, where callers should read
/// the count instead.
pub fn free_energy(z: &CutoffPartition) -> Result<f64> {
    if z.beta == 0.0 {
        return Err(Error::ZeroBeta);
    }
    Ok(-z.log_value / z.beta)
}

/// The two halves of the coupled ensemble over the shared window
/// `|p| <= ground(x,y) + excess`: programs producing `x` that also produce
/// `y`, and those that do not.
#[derive(Debug, Clone, Copy)]
struct Buckets {
    log_with: f64,
    log_without: f64,
    count_with: u128,
    count_without: u128,
    ground_pair: u32,
}

fn buckets(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    excess: u32,
) -> Result<Buckets> {
    let universe = table.universe();
    let pair = universe.pair(x, y)?;
    let ground_pair = table.ground_length(pair)?;
    let window = ground_pair + excess;
    let h = aut.marker_len();
    if window - h > table.core_bound() {
        return Err(Error::WindowTooLarge {
            needed: window - h,
            l_core: table.core_bound(),
        });
    }

    let min_len = h + MIN_CORE_LEN;
    let span = (window - min_len + 1) as usize;
    let mut with_y = vec![0u128; span];
    let mut without_y = vec![0u128; span];
    for core in table.cores() {
        if !core.output.contains(x) || core.len() + h > window {
            continue;
        }
        let side = if core.output.contains(y) {
            &mut with_y
        } else {
            &mut without_y
        };
        for d in h..=window - core.len() {
            side[(core.len() + d - min_len) as usize] += aut.wrapper_count(d);
        }
    }

    let log_of = |counts: &[u128]| {
        let terms: Vec<f64> = counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (n as f64).ln() - beta * f64::from(min_len + i as u32))
            .collect();
        log_sum_exp(&terms)
    };

    Ok(Buckets {
        log_with: log_of(&with_y),
        log_without: log_of(&without_y),
        count_with: with_y.iter().sum(),
        count_without: without_y.iter().sum(),
        ground_pair,
    })
}

/// Coupled partition `Z^(lambda)`: admissible programs are those producing
/// `x` within the shared window, and programs missing `y` pay the coupling
/// energy `J * lambda`.
pub fn coupled_partition(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    params: &EnsembleParams,
) -> Result<CutoffPartition> {
    params.validate()?;
    let b = buckets(table, aut, x, y, params.beta, params.excess)?;
    let (log_value, count) = match params.coupling {
        Coupling::Hard if params.lambda > 0.0 => (b.log_with, b.count_with),
        Coupling::Hard => (
            log_sum_exp(&[b.log_with, b.log_without]),
            b.count_with + b.count_without,
        ),
        Coupling::Soft(j) => (
            log_sum_exp(&[b.log_with, b.log_without - params.beta * j * params.lambda]),
            b.count_with + b.count_without,
        ),
    };
    Ok(CutoffPartition {
        log_value,
        beta: params.beta,
        ground: b.ground_pair,
        excess: params.excess,
        target: table.universe().singleton(x)?,
        count,
        coupling: Some(CouplingState {
            partner: y,
            lambda: params.lambda,
            coupling: params.coupling,
        }),
    })
}

/// Generalized force `Phi_lambda = J * <1 - s_y>_lambda`, the mean coupling
/// gradient over the coupled ensemble. Undefined for hard coupling.
pub fn generalized_force(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    params: &EnsembleParams,
) -> Result<f64> {
    params.validate()?;
    let Coupling::Soft(j) = params.coupling else {
        return Err(Error::HardCouplingForce);
    };
    let b = buckets(table, aut, x, y, params.beta, params.excess)?;
    if b.count_without == 0 {
        return Ok(0.0);
    }
    // J * B e^{-beta J lambda} / (A + B e^{-beta J lambda}), evaluated as a
    // logistic in log space
    let t = b.log_with - (b.log_without - params.beta * j * params.lambda);
    Ok(j / (1.0 + t.exp()))
}

/// Reversible work `F(x,y) - F(x)` under per-constraint windows, with the
/// depth (ground-length difference) and diversity (effective-degeneracy)
/// fields of the high-temperature decomposition filled in.
pub fn reversible_work_direct(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    excess: u32,
) -> Result<WorkDecomposition> {
    check_beta_positive(beta)?;
    let universe = table.universe();
    let sx = universe.singleton(x)?;
    let pair = universe.pair(x, y)?;
    let zx = partition_function(table, aut, sx, beta, excess)?;
    let zxy = partition_function(table, aut, pair, beta, excess)?;
    let work = free_energy(&zxy)? - free_energy(&zx)?;

    let alpha = aut.growth_rate(GROWTH_TOL)?.alpha;
    let m_x = effective_degeneracy(&table.spectrum(sx, excess)?, alpha, excess)?;
    let m_xy = effective_degeneracy(&table.spectrum(pair, excess)?, alpha, excess)?;
    Ok(WorkDecomposition {
        work,
        depth: f64::from(zxy.ground) - f64::from(zx.ground),
        diversity: -(m_xy / m_x).ln() / beta,
    })
}

/// Reversible work by thermodynamic integration: Gauss-Legendre quadrature
/// of the generalized force over `lambda` in [0, 1], under the shared-window
/// soft ensemble. Agrees with the endpoint free-energy difference up to
/// quadrature error.
#[allow(clippy::too_many_arguments)]
pub fn reversible_work_ti(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    coupling_strength: f64,
    excess: u32,
    nodes: u32,
) -> Result<f64> {
    check_beta_positive(beta)?;
    if nodes < 2 {
        return Err(Error::TooFewNodes(nodes));
    }
    if coupling_strength <= 0.0 || !coupling_strength.is_finite() {
        return Err(Error::NonPositiveCoupling(coupling_strength));
    }
    let b = buckets(table, aut, x, y, beta, excess)?;
    if b.count_without == 0 {
        return Ok(0.0);
    }
    let (xs, ws) = gauss_legendre_unit(nodes);
    let force = |lambda: f64| {
        let t = b.log_with - (b.log_without - beta * coupling_strength * lambda);
        coupling_strength / (1.0 + t.exp())
    };
    Ok(xs.iter().zip(&ws).map(|(&l, &w)| w * force(l)).sum())
}

/// Exact magnitude of the gap between the soft coupled ensemble at
/// `lambda = 1` and the hard constraint, `F_hard(x,y) - F_J(1) =
/// ln1p((B/A) e^{-beta J}) / beta` over the two buckets (the soft free
/// energy approaches the hard one from below). The `ln1p` form keeps the
/// gap strictly positive and strictly decreasing in `J` even when it is far
/// below the float epsilon of the free energies themselves.
pub fn soft_hard_gap(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    coupling_strength: f64,
    excess: u32,
) -> Result<f64> {
    check_beta_positive(beta)?;
    if coupling_strength <= 0.0 || !coupling_strength.is_finite() {
        return Err(Error::NonPositiveCoupling(coupling_strength));
    }
    let b = buckets(table, aut, x, y, beta, excess)?;
    if b.count_without == 0 {
        return Ok(0.0);
    }
    let ratio = (b.log_without - b.log_with - beta * coupling_strength).exp();
    Ok(ratio.ln_1p() / beta)
}

/// Solomonoff-style weight: the partition function at `beta = ln 2`, so each
/// program of length `l` contributes `2^{-l}`.
pub fn solomonoff_weight(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    target: ObjectSet,
    excess: u32,
) -> Result<CutoffPartition> {
    partition_function(table, aut, target, std::f64::consts::LN_2, excess)
}

/// Kraft sum over *all* valid programs of length at most `l_total`, as an
/// exact dyadic rational. Prefix-freeness keeps it at or below one.
pub fn kraft_sum(table: &ProgramTable, aut: &WrapperAutomaton, l_total: u32) -> Result<KraftSum> {
    assert!(
        l_total <= 60,
        "kraft sums tracked exactly only up to 60-bit programs"
    );
    let h = aut.marker_len();
    if l_total >= h + MIN_CORE_LEN && l_total - h > table.core_bound() {
        return Err(Error::WindowTooLarge {
            needed: l_total - h,
            l_core: table.core_bound(),
        });
    }
    let mut numerator = 0u128;
    for core in table.cores() {
        if core.len() + h > l_total {
            continue;
        }
        for d in h..=l_total - core.len() {
            numerator += aut.wrapper_count(d) << (l_total - core.len() - d);
        }
    }
    Ok(KraftSum { numerator, l_total })
}

/// Uniform predicate counting: the number of subsets of the universe
/// containing both `x` and `y` is `2^{n-2}` regardless of the pair. For
/// universes of at most 20 objects the value is re-verified by exhaustive
/// bitmask enumeration.
pub fn udt_pair_count(universe: &Universe, x: ObjectId, y: ObjectId) -> Result<u64> {
    universe.check(x)?;
    universe.check(y)?;
    if x == y {
        return Err(Error::SelfPair(x));
    }
    let n = universe.size();
    let count = 1u64 << (n - 2);
    if n <= 20 {
        let both = 1u32 << x | 1u32 << y;
        let direct = (0u32..1 << n).filter(|m| m & both == both).count() as u64;
        assert_eq!(direct, count, "bitmask enumeration disagrees with 2^(n-2)");
    }
    Ok(count)
}

/// Exhaustive pair-independence check: verifies that every unordered pair
/// of distinct objects sits in exactly `2^{n-2}` subsets (each pair is
/// itself re-verified by bitmask enumeration) and returns the common count.
/// Pairs are scanned in parallel under the `parallel` feature.
pub fn udt_all_pairs(universe: &Universe) -> Result<u64> {
    let n = universe.size();
    if n > 20 {
        return Err(Error::UniverseTooLargeForCheck(n));
    }
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            pairs.push((x, y));
        }
    }
    let counts = crate::exec::map_indexed(pairs.len(), |i| {
        udt_pair_count(universe, pairs[i].0, pairs[i].1)
    });
    let expect = 1u64 << (n - 2);
    for c in counts {
        assert_eq!(c?, expect, "pair counts must be identical");
    }
    Ok(expect)
}

/// Exact work at (small) `beta` together with the depth + diversity
/// prediction and the window-count comparison.
pub fn high_temp_decomposition(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    beta: f64,
    excess: u32,
) -> Result<HighTempCheck> {
    let decomposition = reversible_work_direct(table, aut, x, y, beta, excess)?;
    let universe = table.universe();
    let cx = partition_function(table, aut, universe.singleton(x)?, 0.0, excess)?.count;
    let cxy = partition_function(table, aut, universe.pair(x, y)?, 0.0, excess)?.count;
    Ok(HighTempCheck {
        decomposition,
        boltzmann_ratio: (-beta * decomposition.work).exp(),
        count_ratio: cxy as f64 / cx as f64,
    })
}

/// Information distance on the toy machine:
/// `max(ground(x,y) - ground(x), ground(x,y) - ground(y))`.
///
/// The excess argument only fixes how far the enumeration must reach; the
/// distance itself involves ground lengths alone.
pub fn information_distance(
    table: &ProgramTable,
    x: ObjectId,
    y: ObjectId,
    excess: u32,
) -> Result<u32> {
    let universe = table.universe();
    let pair = universe.pair(x, y)?;
    let gp = table.ground_core_len(pair)?;
    if gp + excess > table.core_bound() {
        return Err(Error::WindowTooLarge {
            needed: gp + excess,
            l_core: table.core_bound(),
        });
    }
    let gx = table.ground_core_len(universe.singleton(x)?)?;
    let gy = table.ground_core_len(universe.singleton(y)?)?;
    Ok((gp - gx).max(gp - gy))
}
