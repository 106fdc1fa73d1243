//! Non-equilibrium work estimation along a coupling schedule.
//!
//! The sampler never materializes wrapper bits. Because the energy depends
//! only on total length and the output only on the core, all programs with
//! the same (core, wrapper length) collapse into one state carrying the
//! analytic wrapper multiplicity. Proposals come from the static
//! coupling-blind distribution (the `lambda = 0` equilibrium), which makes
//! the chain an independence sampler with acceptance `min(1, e^{-beta
//! dE_coupling})` and gives exact draws at the start of each trajectory.
//!
//! Trajectories use per-index rng streams, so estimates are bit-identical for
//! a fixed protocol and seed no matter how many threads run them.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::automaton::WrapperAutomaton;
use crate::ensemble::{coupled_partition, free_energy, Coupling, EnsembleParams};
use crate::error::{Error, Result};
use crate::exec;
use crate::machine::{ObjectId, ProgramTable};

/// A switching protocol: strictly increasing lambda schedule from 0 to 1,
/// equilibration sweeps per step, trajectory count, and the ensemble
/// parameters. The coupling strength must be finite here; hard constraints
/// have no Metropolis acceptance rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub beta: f64,
    pub coupling_strength: f64,
    pub excess: u32,
    pub lambdas: Vec<f64>,
    pub sweeps: u32,
    pub trajectories: u32,
    pub seed: u64,
}

impl Protocol {
    /// Uniform schedule with `steps` increments (so `steps + 1` lambda
    /// values including both endpoints).
    pub fn linear(
        steps: u32,
        sweeps: u32,
        trajectories: u32,
        seed: u64,
        beta: f64,
        coupling_strength: f64,
        excess: u32,
    ) -> Self {
        let lambdas = (0..=steps)
            .map(|k| f64::from(k) / f64::from(steps.max(1)))
            .collect();
        Protocol {
            beta,
            coupling_strength,
            excess,
            lambdas,
            sweeps,
            trajectories,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.len() < 2 {
            return Err(Error::BadSchedule("need at least the two endpoints".into()));
        }
        if self.lambdas[0] != 0.0 || *self.lambdas.last().unwrap() != 1.0 {
            return Err(Error::BadSchedule(
                "endpoints must be exactly 0 and 1".into(),
            ));
        }
        if self.lambdas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadSchedule(
                "schedule must be strictly increasing".into(),
            ));
        }
        if self.beta <= 0.0 || !self.beta.is_finite() {
            return Err(Error::NonPositiveBeta(self.beta));
        }
        if self.coupling_strength <= 0.0 || !self.coupling_strength.is_finite() {
            return Err(Error::NonPositiveCoupling(self.coupling_strength));
        }
        if self.trajectories < 2 {
            return Err(Error::TooFewTrajectories(self.trajectories));
        }
        Ok(())
    }
}

/// One collapsed sampler state: a core index plus a wrapper length, standing
/// for all `a_d` concrete programs with that shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollapsedState {
    pub core_idx: usize,
    pub wrapper_len: u32,
    pub total_len: u32,
    pub contains_y: bool,
    /// Number of concrete programs collapsed into this state.
    pub multiplicity: u128,
}

/// The admissible state space for one (x, y, window) triple, with the static
/// proposal distribution baked in.
#[derive(Debug, Clone)]
pub struct StateSpace {
    pub x: ObjectId,
    pub y: ObjectId,
    pub beta: f64,
    /// Absolute program-length bound `ground(x,y) + excess`.
    pub window: u32,
    states: Vec<CollapsedState>,
    /// Cumulative proposal weights, normalized to end at 1.
    cumulative: Vec<f64>,
}

/// Enumerates the collapsed admissible states: programs producing `x` within
/// the shared window, flagged by whether they also produce `y`.
pub fn build_state_space(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    excess: u32,
    beta: f64,
) -> Result<StateSpace> {
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

    let mut states = Vec::new();
    for (core_idx, core) in table.cores().iter().enumerate() {
        if !core.output.contains(x) || core.len() + h > window {
            continue;
        }
        for d in h..=window - core.len() {
            states.push(CollapsedState {
                core_idx,
                wrapper_len: d,
                total_len: core.len() + d,
                contains_y: core.output.contains(y),
                multiplicity: aut.wrapper_count(d),
            });
        }
    }
    if states.is_empty() {
        return Err(Error::EmptyStateSpace);
    }

    // static proposal ~ a_d e^{-beta |p|}; lengths are shifted to the window
    // minimum before scaling by beta so deep-quench runs keep full precision
    let min_len = states.iter().map(|s| s.total_len).min().unwrap();
    let weights: Vec<f64> = states
        .iter()
        .map(|s| (s.multiplicity as f64).ln() - beta * f64::from(s.total_len - min_len))
        .collect();
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut cumulative = Vec::with_capacity(states.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += (w - max).exp();
        cumulative.push(acc);
    }
    let total = acc;
    for c in &mut cumulative {
        *c /= total;
    }
    *cumulative.last_mut().unwrap() = 1.0;

    Ok(StateSpace {
        x,
        y,
        beta,
        window,
        states,
        cumulative,
    })
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[CollapsedState] {
        &self.states
    }

    /// Total number of concrete programs represented.
    pub fn weighted_count(&self) -> u128 {
        self.states.iter().map(|s| s.multiplicity).sum()
    }

    /// Exact draw from the static proposal (= the `lambda = 0` equilibrium).
    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.cumulative
            .partition_point(|&c| c < u)
            .min(self.states.len() - 1)
    }

    fn coupling_energy(&self, idx: usize, lambda: f64, j: f64) -> f64 {
        if self.states[idx].contains_y {
            0.0
        } else {
            j * lambda
        }
    }

    /// Exact equilibrium probability of a state under the coupled ensemble,
    /// for cross-checking the sampler.
    pub fn exact_probability(&self, idx: usize, lambda: f64, j: f64) -> f64 {
        let log_pi = |i: usize| {
            (self.states[i].multiplicity as f64).ln()
                - self.beta
                    * (f64::from(self.states[i].total_len) + self.coupling_energy(i, lambda, j))
        };
        let terms: Vec<f64> = (0..self.states.len()).map(log_pi).collect();
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = terms.iter().map(|t| (t - max).exp()).sum();
        (log_pi(idx) - max).exp() / z
    }
}

/// One Metropolis update of the independence sampler targeting
/// `pi_beta(. | lambda)`. Proposals are coupling-blind, so the acceptance
/// ratio only sees the coupling-energy difference.
pub fn equilibrium_step<R: Rng + ?Sized>(
    space: &StateSpace,
    current: usize,
    lambda: f64,
    j: f64,
    rng: &mut R,
) -> usize {
    let proposal = space.sample_initial(rng);
    let de = space.coupling_energy(proposal, lambda, j) - space.coupling_energy(current, lambda, j);
    if de <= 0.0 || rng.gen::<f64>() < (-space.beta * de).exp() {
        proposal
    } else {
        current
    }
}

/// Runs one trajectory: exact draw at `lambda = 0`, then alternate work
/// increments and equilibration along the schedule. Returns the accumulated
/// work.
pub fn run_trajectory<R: Rng + ?Sized>(
    space: &StateSpace,
    protocol: &Protocol,
    rng: &mut R,
) -> f64 {
    let j = protocol.coupling_strength;
    let mut state = space.sample_initial(rng);
    let mut work = 0.0;
    for k in 0..protocol.lambdas.len() - 1 {
        let next_lambda = protocol.lambdas[k + 1];
        // E_{lambda'} - E_lambda: the length part cancels exactly
        work += space.coupling_energy(state, next_lambda, j)
            - space.coupling_energy(state, protocol.lambdas[k], j);
        for _ in 0..protocol.sweeps {
            state = equilibrium_step(space, state, next_lambda, j, rng);
        }
    }
    work
}

/// Jarzynski estimate with its spread and the dissipation gap against the
/// exact free-energy difference of the same (shared-window) ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkEstimate {
    /// `-ln <e^{-beta W}> / beta`.
    pub delta_f_estimate: f64,
    /// Jackknife standard error of the estimate.
    pub std_error: f64,
    pub mean_work: f64,
    /// `<W> - dF_exact`; non-negative up to sampling noise.
    pub dissipation: f64,
    pub exact_delta_f: f64,
    pub trajectories: u32,
}

/// Runs the full protocol: independent trajectories (parallel under the
/// `parallel` feature, reduced in index order), the log-mean-exp estimator,
/// jackknife errors, and the exact reference from the coupled partition.
pub fn estimate(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    protocol: &Protocol,
) -> Result<WorkEstimate> {
    run_estimate(table, aut, x, y, protocol, false)
}

/// Single-threaded twin of [`estimate`]; same result bit for bit.
pub fn estimate_sequential(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    protocol: &Protocol,
) -> Result<WorkEstimate> {
    run_estimate(table, aut, x, y, protocol, true)
}

fn run_estimate(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    protocol: &Protocol,
    sequential: bool,
) -> Result<WorkEstimate> {
    protocol.validate()?;
    let space = build_state_space(table, aut, x, y, protocol.excess, protocol.beta)?;
    let works = trajectory_works(&space, protocol, sequential);
    let exact = exact_delta_f(table, aut, x, y, protocol)?;
    Ok(summarize(&works, protocol.beta, exact))
}

/// The work samples themselves, in trajectory order.
pub fn trajectory_works(space: &StateSpace, protocol: &Protocol, sequential: bool) -> Vec<f64> {
    let run = |i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(protocol.seed);
        rng.set_stream(i as u64 + 1);
        run_trajectory(space, protocol, &mut rng)
    };
    if sequential {
        exec::map_indexed_seq(protocol.trajectories as usize, run)
    } else {
        exec::map_indexed(protocol.trajectories as usize, run)
    }
}

/// Exact `dF = F(1) - F(0)` of the soft shared-window ensemble the sampler
/// walks in.
pub fn exact_delta_f(
    table: &ProgramTable,
    aut: &WrapperAutomaton,
    x: ObjectId,
    y: ObjectId,
    protocol: &Protocol,
) -> Result<f64> {
    let at = |lambda| {
        let params = EnsembleParams {
            beta: protocol.beta,
            lambda,
            coupling: Coupling::Soft(protocol.coupling_strength),
            excess: protocol.excess,
        };
        free_energy(&coupled_partition(table, aut, x, y, &params)?)
    };
    Ok(at(1.0)? - at(0.0)?)
}

fn summarize(works: &[f64], beta: f64, exact_delta_f: f64) -> WorkEstimate {
    let t = works.len();
    let log_terms: Vec<f64> = works.iter().map(|w| -beta * w).collect();
    let max = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = log_terms.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();

    let log_mean = max + (total / t as f64).ln();
    let delta_f_estimate = -log_mean / beta;

    // jackknife over trajectories for the biased log-mean-exp estimator
    let mut pseudo = Vec::with_capacity(t);
    for e in &exps {
        let loo = max + ((total - e) / (t - 1) as f64).ln();
        pseudo.push(-loo / beta);
    }
    let pseudo_mean = pseudo.iter().sum::<f64>() / t as f64;
    let var: f64 = pseudo
        .iter()
        .map(|p| (p - pseudo_mean).powi(2))
        .sum::<f64>()
        * (t - 1) as f64
        / t as f64;
    let std_error = var.sqrt();

    let mean_work = works.iter().sum::<f64>() / t as f64;
    WorkEstimate {
        delta_f_estimate,
        std_error,
        mean_work,
        dissipation: mean_work - exact_delta_f,
        exact_delta_f,
        trajectories: t as u32,
    }
}
