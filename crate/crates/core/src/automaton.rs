//! Marker-avoidance automaton: counting, growth rate, and uniform sampling
//! of the wrapper family.
//!
//! The automaton is the classic KMP construction. State `s` means "the
//! longest suffix of the input matching a proper prefix of the marker has
//! length `s`"; completing the marker is a dead end. Restricted to the safe
//! states the transition-count matrix `A` gives exact avoidance counts as
//! `e0ᵀ Aⁿ 1`, and its dominant eigenvalue sets the exponential growth rate
//! of the wrapper family.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::machine::{BitString, DegeneracySpectrum, Marker};

/// Exponential growth of marker-avoiding strings: counts scale like
/// `mu^n = 2^{alpha n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthRate {
    pub mu: f64,
    pub alpha: f64,
    pub tol: f64,
}

#[derive(Debug, Clone)]
pub struct WrapperAutomaton {
    marker: Marker,
    /// `next[s][bit]`; `h` encodes the dead (marker-completed) state.
    next: Vec<[u32; 2]>,
    /// Safe-to-safe transition counts; row sums at most 2.
    matrix: Vec<Vec<u8>>,
}

/// Power-iteration defaults: the matrices are at most 40x40, so a tight
/// tolerance costs nothing.
pub const GROWTH_TOL: f64 = 1e-12;
const GROWTH_MAX_ITERS: u32 = 1_000_000;

pub fn build_automaton(marker: &Marker) -> WrapperAutomaton {
    let h = marker.len() as usize;
    let bits: Vec<bool> = marker.bits().iter().collect();

    // prefix function of the marker
    let mut fail = vec![0usize; h];
    let mut k = 0usize;
    for i in 1..h {
        while k > 0 && bits[i] != bits[k] {
            k = fail[k - 1];
        }
        if bits[i] == bits[k] {
            k += 1;
        }
        fail[i] = k;
    }

    let mut next = vec![[0u32; 2]; h];
    for (s, row) in next.iter_mut().enumerate() {
        for (b, bit) in [false, true].into_iter().enumerate() {
            let mut state = s;
            loop {
                if bits[state] == bit {
                    row[b] = state as u32 + 1;
                    break;
                }
                if state == 0 {
                    row[b] = 0;
                    break;
                }
                state = fail[state - 1];
            }
        }
    }

    let mut matrix = vec![vec![0u8; h]; h];
    for (s, row) in next.iter().enumerate() {
        for &t in row {
            if (t as usize) < h {
                matrix[s][t as usize] += 1;
            }
        }
    }

    WrapperAutomaton {
        marker: marker.clone(),
        next,
        matrix,
    }
}

impl WrapperAutomaton {
    pub fn marker(&self) -> &Marker {
        &self.marker
    }

    pub fn marker_len(&self) -> u32 {
        self.marker.len()
    }

    pub fn state_count(&self) -> usize {
        self.matrix.len()
    }

    pub fn transition(&self, state: u32, bit: bool) -> Option<u32> {
        let t = self.next[state as usize][usize::from(bit)];
        (t < self.marker.len()).then_some(t)
    }

    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.matrix
    }

    /// Exact number of length-`n` binary strings with no marker occurrence.
    pub fn count_avoiding(&self, n: u32) -> u128 {
        self.state_counts(n).iter().sum()
    }

    /// Occupancy per safe state after reading `n` free bits from state 0.
    fn state_counts(&self, n: u32) -> Vec<u128> {
        let h = self.state_count();
        let mut v = vec![0u128; h];
        v[0] = 1;
        for _ in 0..n {
            let mut w = vec![0u128; h];
            for (s, &c) in v.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for b in 0..2 {
                    let t = self.next[s][b] as usize;
                    if t < h {
                        w[t] += c;
                    }
                }
            }
            v = w;
        }
        v
    }

    /// Number of wrappers of length `d`: marker-free prefix plus marker.
    pub fn wrapper_count(&self, d: u32) -> u128 {
        match d.checked_sub(self.marker.len()) {
            Some(free) => self.count_avoiding(free),
            None => 0,
        }
    }

    /// Dominant eigenvalue of the transition matrix by power iteration on the
    /// Rayleigh quotient. A nilpotent matrix, or one with `mu < 1`, means the
    /// wrapper family is finite and has no meaningful growth rate.
    pub fn growth_rate(&self, tol: f64) -> Result<GrowthRate> {
        assert!(tol > 0.0, "tolerance must be positive");
        let h = self.state_count();
        let a: Vec<Vec<f64>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&x| f64::from(x)).collect())
            .collect();
        let mut v = vec![1.0 / (h as f64).sqrt(); h];
        let mut rq_prev = f64::NAN;
        for _ in 0..GROWTH_MAX_ITERS {
            let mut w = vec![0.0; h];
            for (s, row) in a.iter().enumerate() {
                for (t, &x) in row.iter().enumerate() {
                    w[t] += x * v[s];
                }
            }
            let norm2: f64 = w.iter().map(|x| x * x).sum();
            if norm2 == 0.0 {
                return Err(Error::FiniteWrapperFamily);
            }
            let rq: f64 = v.iter().zip(&w).map(|(x, y)| x * y).sum();
            let norm = norm2.sqrt();
            for (x, y) in v.iter_mut().zip(&w) {
                *x = y / norm;
            }
            if rq_prev.is_finite() && ((rq - rq_prev) / rq).abs() < tol {
                if rq < 1.0 - 1e-9 {
                    return Err(Error::FiniteWrapperFamily);
                }
                return Ok(GrowthRate {
                    mu: rq,
                    alpha: rq.log2(),
                    tol,
                });
            }
            rq_prev = rq;
        }
        if rq_prev >= 1.0 - 1e-9 {
            Ok(GrowthRate {
                mu: rq_prev,
                alpha: rq_prev.log2(),
                tol,
            })
        } else {
            Err(Error::FiniteWrapperFamily)
        }
    }

    /// Uniform sample from the marker-avoiding strings of length `n`, by
    /// backward counting along automaton paths.
    pub fn sample_avoiding<R: Rng + ?Sized>(&self, n: u32, rng: &mut R) -> Result<BitString> {
        let h = self.state_count();
        // completions[k][s] = number of length-k safe continuations from s
        let mut completions = vec![vec![0u128; h]; n as usize + 1];
        completions[0].fill(1);
        for k in 1..=n as usize {
            for s in 0..h {
                let mut c = 0u128;
                for b in 0..2 {
                    let t = self.next[s][b] as usize;
                    if t < h {
                        c += completions[k - 1][t];
                    }
                }
                completions[k][s] = c;
            }
        }
        if completions[n as usize][0] == 0 {
            return Err(Error::NoWrappers(n + self.marker.len()));
        }
        let mut out = BitString::empty();
        let mut state = 0usize;
        for k in (1..=n as usize).rev() {
            let weight = |b: usize| {
                let t = self.next[state][b] as usize;
                if t < h {
                    completions[k - 1][t]
                } else {
                    0
                }
            };
            let w0 = weight(0);
            let w1 = weight(1);
            let total = w0 + w1;
            debug_assert!(total > 0);
            let pick1 = if w0 == 0 {
                true
            } else if w1 == 0 {
                false
            } else {
                // exact threshold sampling on the integer counts
                rng.gen_range(0..total) >= w0
            };
            out.push(pick1)?;
            state = self.next[state][usize::from(pick1)] as usize;
        }
        Ok(out)
    }

    /// Uniform sample from the wrappers of length `d` (avoiding prefix plus
    /// the marker). Errors when no wrapper of that length exists.
    pub fn sample_wrapper<R: Rng + ?Sized>(&self, d: u32, rng: &mut R) -> Result<BitString> {
        let free = d
            .checked_sub(self.marker.len())
            .ok_or(Error::NoWrappers(d))?;
        let prefix = self.sample_avoiding(free, rng)?;
        prefix.concat(self.marker.bits())
    }

    /// Seeded convenience for reproducible wrapper draws.
    pub fn sample_wrapper_seeded(&self, d: u32, seed: u64) -> Result<BitString> {
        self.sample_wrapper(d, &mut ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Effective degeneracy: ground multiplicity plus geometrically discounted
/// alternative-core multiplicities,
/// `m + sum_{d=1..=excess} m^(d) 2^{-alpha d}`.
///
/// With `alpha = 0` nothing is discounted; the sum is still returned but only
/// stabilizes when the spectrum tail does.
pub fn effective_degeneracy(spectrum: &DegeneracySpectrum, alpha: f64, excess: u32) -> Result<f64> {
    if spectrum.max_excess() < excess {
        return Err(Error::SpectrumTooShort {
            have: spectrum.max_excess(),
            need: excess,
        });
    }
    let mut m = spectrum.ground_multiplicity() as f64;
    for d in 1..=excess {
        m += spectrum.multiplicity(d) as f64 * (-alpha * f64::from(d)).exp2();
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aut(m: &str) -> WrapperAutomaton {
        build_automaton(&Marker::parse(m).unwrap())
    }

    #[test]
    fn automaton_for_011_matches_hand_construction() {
        let a = aut("011");
        assert_eq!(a.state_count(), 3);
        assert_eq!(a.transition(0, false), Some(1));
        assert_eq!(a.transition(0, true), Some(0));
        assert_eq!(a.transition(1, false), Some(1));
        assert_eq!(a.transition(1, true), Some(2));
        assert_eq!(a.transition(2, false), Some(1));
        assert_eq!(a.transition(2, true), None);
    }

    #[test]
    fn avoidance_counts_for_011() {
        let a = aut("011");
        assert_eq!(a.count_avoiding(0), 1);
        assert_eq!(a.count_avoiding(3), 7);
        assert_eq!(a.count_avoiding(4), 12);
    }

    #[test]
    fn single_bit_marker_has_one_avoider_per_length() {
        let a = aut("0");
        for n in 0..20 {
            assert_eq!(a.count_avoiding(n), 1);
        }
        assert_eq!(a.wrapper_count(1), 1);
        assert_eq!(a.wrapper_count(9), 1);
    }

    #[test]
    fn wrapper_counts_for_011() {
        let a = aut("011");
        assert_eq!(a.wrapper_count(2), 0);
        let got: Vec<u128> = (3..=7).map(|d| a.wrapper_count(d)).collect();
        assert_eq!(got, vec![1, 2, 4, 7, 12]);
    }

    #[test]
    fn growth_rate_of_011_is_the_golden_ratio() {
        let g = aut("011").growth_rate(GROWTH_TOL).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((g.mu - phi).abs() < 1e-9, "mu = {}", g.mu);
        assert!((g.alpha - phi.log2()).abs() < 1e-9);
    }

    #[test]
    fn growth_rate_of_single_bit_marker_is_one() {
        let g = aut("0").growth_rate(GROWTH_TOL).unwrap();
        assert!((g.mu - 1.0).abs() < 1e-9);
        assert!(g.alpha.abs() < 1e-9);
    }

    #[test]
    fn growth_rate_matches_count_ratio() {
        // wrapper-count ratios converge to mu; check at d = 30 for both the
        // default marker and a longer one
        for marker in ["011", "0001"] {
            let a = aut(marker);
            let g = a.growth_rate(GROWTH_TOL).unwrap();
            let h = a.marker_len();
            let ratio = a.wrapper_count(h + 31) as f64 / a.wrapper_count(h + 30) as f64;
            assert!(
                (g.mu - ratio).abs() < 1e-4,
                "{marker}: mu = {} ratio = {ratio}",
                g.mu
            );
        }
        let a = aut("0001");
        let g = a.growth_rate(GROWTH_TOL).unwrap();
        let ratio = a.count_avoiding(31) as f64 / a.count_avoiding(30) as f64;
        assert!(
            (g.mu - ratio).abs() < 1e-4,
            "mu = {} ratio = {}",
            g.mu,
            ratio
        );
    }

    #[test]
    fn sampling_respects_support() {
        let a = aut("011");
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // d = 3: only the marker itself
        for _ in 0..10 {
            assert_eq!(a.sample_wrapper(3, &mut rng).unwrap().to_string(), "011");
        }
        // d = 4: exactly "0011" or "1011"
        for _ in 0..50 {
            let w = a.sample_wrapper(4, &mut rng).unwrap().to_string();
            assert!(w == "0011" || w == "1011");
        }
        assert!(matches!(
            a.sample_wrapper(2, &mut rng),
            Err(Error::NoWrappers(2))
        ));
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        let a = aut("011");
        assert_eq!(
            a.sample_wrapper_seeded(9, 42).unwrap(),
            a.sample_wrapper_seeded(9, 42).unwrap()
        );
    }

    #[test]
    fn effective_degeneracy_limits() {
        let t = {
            let u = crate::machine::Universe::new(4).unwrap();
            let m = Marker::parse("011").unwrap();
            crate::machine::ProgramTable::build(&u, &m, 19).unwrap()
        };
        let s0 = t.universe().singleton(0).unwrap();
        let sp = t.spectrum(s0, 4).unwrap();
        let alpha = aut("011").growth_rate(GROWTH_TOL).unwrap().alpha;

        // excess 0 keeps only the ground multiplicity
        assert_eq!(effective_degeneracy(&sp, alpha, 0).unwrap(), 1.0);

        // spectrum [1, 0, 1, 0, 5]: m~ = 1 + 2^{-2a} + 5 * 2^{-4a}
        let expect = 1.0 + (-2.0 * alpha).exp2() + 5.0 * (-4.0 * alpha).exp2();
        let got = effective_degeneracy(&sp, alpha, 4).unwrap();
        assert!((got - expect).abs() < 1e-12);

        assert!(matches!(
            effective_degeneracy(&sp, alpha, 6),
            Err(Error::SpectrumTooShort { have: 4, need: 6 })
        ));
    }

    #[test]
    fn effective_degeneracy_nondecreasing_in_window() {
        let t = {
            let u = crate::machine::Universe::new(4).unwrap();
            let m = Marker::parse("011").unwrap();
            crate::machine::ProgramTable::build(&u, &m, 19).unwrap()
        };
        let alpha = aut("011").growth_rate(GROWTH_TOL).unwrap().alpha;
        let pair = t.universe().pair(0, 1).unwrap();
        let sp = t.spectrum(pair, 8).unwrap();
        let mut prev = 0.0;
        for lam in 0..=8 {
            let m = effective_degeneracy(&sp, alpha, lam).unwrap();
            assert!(m >= prev);
            prev = m;
        }

        // successive non-zero increments shrink geometrically: each step is
        // bounded by 2^{-2 alpha} times the worst spectrum growth ratio
        let incs: Vec<f64> = (1..=4)
            .map(|k| sp.multiplicity(2 * k) as f64 * (-alpha * f64::from(2 * k)).exp2())
            .collect();
        let max_growth = (1..4)
            .map(|k| sp.multiplicity(2 * (k + 1)) as f64 / sp.multiplicity(2 * k) as f64)
            .fold(0.0, f64::max);
        for w in incs.windows(2) {
            assert!(w[1] <= w[0] * (-2.0 * alpha).exp2() * max_growth * (1.0 + 1e-12));
        }
    }
}
