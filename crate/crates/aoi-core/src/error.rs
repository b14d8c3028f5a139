use alloc::vec::Vec;
use core::fmt;

/// Errors produced by construction and analysis operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A channel profile must contain at least one node.
    EmptyProfile,
    /// A decode-success probability was zero, negative, or NaN.
    NonPositiveProbability { index: usize },
    /// A decode-success probability exceeded one.
    ProbabilityAboveOne { index: usize },
    /// An attempt probability was outside [0, 1] or NaN.
    AttemptOutOfRange { index: usize },
    /// Per-node vector length does not match the profile.
    LengthMismatch { expected: usize, actual: usize },
    /// The turn cap must be at least one slot.
    ZeroTurnCap,
    /// Node index outside the profile.
    NodeOutOfRange { node: usize, count: usize },
    /// Moments violate mean >= 1 or second_moment >= mean^2.
    InvalidMoments { mean: f64, second_moment: f64 },
    /// The age formula requires a strictly positive mean.
    NonPositiveMean,
    /// A network age needs at least one per-node age.
    EmptyAgeList,
    /// Operation requires every attempt probability strictly inside (0, 1).
    DegenerateAttempt { index: usize },
    /// Operation is defined only for networks of two or more nodes; a single
    /// node trivially transmits in every slot (tau = 1).
    SingleNode,
    /// Tolerance outside the documented range for this operation.
    InvalidTolerance { tol: f64 },
    /// Iterative solver failed to reach the tolerance.
    NoConvergence {
        iterations: usize,
        residual: f64,
        /// Last iterate, for diagnostics.
        last: Vec<f64>,
    },
    /// PMF truncation did not reach the tail tolerance within the cap.
    TruncationCapExceeded { cap: usize },
    /// Empirical age needs at least two recorded updates.
    TooFewUpdates { node: usize },
    /// Simulation horizon must be in [1, 2^40].
    InvalidHorizon { horizon: u64 },
    /// At least one replication is required.
    ZeroReplications,
    /// p_min <= p_max violated.
    InvalidProbabilityRange { p_min: f64, p_max: f64 },
    /// Computed log-age-ratio escaped its analytic bounds; this indicates an
    /// implementation bug, not a property of the inputs.
    BoundViolation { value: f64, lower: f64, upper: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyProfile => write!(f, "channel profile is empty"),
            Error::NonPositiveProbability { index } => {
                write!(f, "decode probability of node {} is not in (0, 1]: must be positive", index + 1)
            }
            Error::ProbabilityAboveOne { index } => {
                write!(f, "decode probability of node {} exceeds 1", index + 1)
            }
            Error::AttemptOutOfRange { index } => {
                write!(f, "attempt probability of node {} is outside [0, 1]", index + 1)
            }
            Error::LengthMismatch { expected, actual } => {
                write!(f, "expected {expected} per-node entries, got {actual}")
            }
            Error::ZeroTurnCap => write!(f, "turn cap must be >= 1 slot"),
            Error::NodeOutOfRange { node, count } => {
                write!(f, "node index {node} out of range for {count} nodes")
            }
            Error::InvalidMoments { mean, second_moment } => {
                write!(f, "invalid inter-update moments (mean {mean}, second {second_moment})")
            }
            Error::NonPositiveMean => write!(f, "mean inter-update time must be positive"),
            Error::EmptyAgeList => write!(f, "need at least one per-node age"),
            Error::DegenerateAttempt { index } => {
                write!(f, "attempt probability of node {} must lie strictly in (0, 1)", index + 1)
            }
            Error::SingleNode => {
                write!(f, "operation needs M >= 2 nodes; with one node tau = 1 is optimal")
            }
            Error::InvalidTolerance { tol } => write!(f, "tolerance {tol} out of range"),
            Error::NoConvergence { iterations, residual, .. } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:e})")
            }
            Error::TruncationCapExceeded { cap } => {
                write!(f, "PMF tail not reached within {cap} terms")
            }
            Error::TooFewUpdates { node } => {
                write!(f, "node {} has fewer than two updates; age unmeasurable", node + 1)
            }
            Error::InvalidHorizon { horizon } => {
                write!(f, "horizon {horizon} outside [1, 2^40] slots")
            }
            Error::ZeroReplications => write!(f, "need at least one replication"),
            Error::InvalidProbabilityRange { p_min, p_max } => {
                write!(f, "invalid probability range [{p_min}, {p_max}]")
            }
            Error::BoundViolation { value, lower, upper } => {
                write!(f, "value {value} escaped bounds [{lower}, {upper}]; this is a bug")
            }
        }
    }
}

impl core::error::Error for Error {}
