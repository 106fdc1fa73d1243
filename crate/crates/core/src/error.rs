//! Error types shared by all modules.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a bit string fails to be a program of the machine.
///
/// Such strings are treated as non-halting: they are excluded from every
/// ensemble rather than reported to the caller as ordinary values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NonHalting {
    #[error("no marker occurrence; wrapper never terminates")]
    NoMarker,
    #[error("core bit stream is truncated")]
    Truncated,
    #[error("core decodes to an empty list; output would be the empty set")]
    EmptyOutput,
    #[error("{0} surplus bits after a complete core")]
    TrailingBits(u32),
    #[error("core names object {0}, which is outside the universe")]
    UnknownObject(u64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("universe size must lie in 2..=24, got {0}")]
    UniverseSize(u32),

    #[error("expected {expected} labels for a universe of {expected}, got {got}")]
    LabelCount { expected: u32, got: usize },

    #[error("object id {id} out of range for universe of {n}")]
    ObjectOutOfRange { id: u32, n: u32 },

    #[error("invalid marker {0:?}: {reason}", reason = .1)]
    InvalidMarker(String, String),

    #[error("core expression must name at least one object")]
    EmptyCore,

    #[error("target set must be non-empty")]
    EmptyTarget,

    #[error("not a program: {0}")]
    NonHalting(#[from] NonHalting),

    #[error("bit string longer than {max} bits", max = crate::machine::BitString::MAX_LEN)]
    BitStringOverflow,

    #[error("invalid bit character {0:?}; expected '0' or '1'")]
    BadBitChar(char),

    #[error("target {target} is not coverable by any core of length <= {l_core}")]
    Unsatisfiable { target: String, l_core: u32 },

    #[error(
        "window needs cores up to {needed} bits but the table stops at {l_core}; \
         re-enumerate with a larger core bound"
    )]
    WindowTooLarge { needed: u32, l_core: u32 },

    #[error("core length bound {0} exceeds the desk-scale limit of 40")]
    CoreBoundTooLarge(u32),

    #[error("free energy is undefined at beta = 0; use the count mode of the partition")]
    ZeroBeta,

    #[error("beta must be positive, got {0}")]
    NonPositiveBeta(f64),

    #[error("generalized force is undefined under a hard coupling; use a finite J")]
    HardCouplingForce,

    #[error("coupling strength must be positive, got {0}")]
    NonPositiveCoupling(f64),

    #[error("quadrature needs at least 2 nodes, got {0}")]
    TooFewNodes(u32),

    #[error("no wrappers of length {0} exist")]
    NoWrappers(u32),

    #[error("the admissible state space is empty")]
    EmptyStateSpace,

    #[error("marker admits only finitely many avoiding strings; no growth rate")]
    FiniteWrapperFamily,

    #[error("degeneracy spectrum only reaches excess {have}, need {need}")]
    SpectrumTooShort { have: u32, need: u32 },

    #[error("predicate counting needs two distinct objects, got {0} twice")]
    SelfPair(u32),

    #[error("exhaustive predicate check limited to universes of at most 20 objects, got {0}")]
    UniverseTooLargeForCheck(u32),

    #[error("lambda schedule invalid: {0}")]
    BadSchedule(String),

    #[error("protocol needs at least 2 trajectories, got {0}")]
    TooFewTrajectories(u32),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
