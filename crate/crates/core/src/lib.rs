//! Exact statistical mechanics over program ensembles on a toy prefix-free
//! universal machine.
//!
//! Programs are bit strings `wrapper ‖ core`. The wrapper is marker-terminated
//! syntactic padding that never influences the output; the core is a
//! self-delimiting list of object ids that evaluates to a non-empty subset of
//! a small finite universe. Everything downstream is exact at desk scale:
//! wrapper families are counted analytically by a transfer matrix, cores by
//! exhaustive enumeration, and Boltzmann sums over programs collapse to small
//! convolutions of the two.
//!
//! On top of the machine the crate provides
//!
//! * cutoff partition functions and free energies over membership
//!   constraints ([`ensemble`]),
//! * reversible work between constraints, directly and by thermodynamic
//!   integration, with its depth/diversity decomposition,
//! * Solomonoff-style weights, Kraft sums, and uniform predicate counting,
//! * a Jarzynski work estimator driven by Metropolis sampling over the
//!   collapsed program state space ([`jarzynski`]),
//! * scripted parameter sweeps that emit CSV plus a plot script
//!   ([`experiments`]).
//!
//! With the default `parallel` feature the embarrassingly parallel loops
//! (enumeration by core length, grid sweeps, independent trajectories) run on
//! rayon; results are merged in deterministic order so outputs are identical
//! to the sequential fallback.

pub mod automaton;
pub mod ensemble;
pub mod error;
mod exec;
pub mod experiments;
pub mod jarzynski;
pub mod machine;
pub mod quadrature;

pub use error::{Error, Result};
