//! One error type for the whole crate.

use thiserror::Error;

/// Everything that can go wrong constructing model values, applying
/// mechanisms, or running verifiers. Grouped roughly by origin; the CLI
/// maps these onto its exit-code contract.
#[derive(Debug, Error)]
pub enum Error {
    // -- model construction ------------------------------------------------
    #[error("invalid interval: need finite lo < hi, got [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("agent report needs at least one location")]
    EmptyReport,

    #[error("location {location} is not finite")]
    NonFiniteLocation { location: f64 },

    #[error("profile needs at least one agent")]
    EmptyProfile,

    #[error("agent {agent}: location {location} outside interval [{lo}, {hi}]")]
    AgentOutsideInterval {
        agent: usize,
        location: f64,
        lo: f64,
        hi: f64,
    },

    #[error("agent index {index} out of range for profile with {n} agents")]
    AgentIndexOutOfRange { index: usize, n: usize },

    #[error("location {location} outside interval [{lo}, {hi}]")]
    OutsideInterval { location: f64, lo: f64, hi: f64 },

    #[error("lottery needs at least one support point with positive probability")]
    EmptyLottery,

    #[error("lottery probability {probability} is negative or not finite")]
    BadProbability { probability: f64 },

    #[error("lottery probabilities sum to {sum}, expected 1 within {tolerance}")]
    LotteryNotNormalized { sum: f64, tolerance: f64 },

    // -- mechanism application ---------------------------------------------
    #[error("mechanism {mechanism} accepts type-1 agents only (agent {agent} is type 2)")]
    Type1Only { mechanism: String, agent: usize },

    #[error("{what} requires single-location reports (agent {agent} reports {k} locations)")]
    SingleLocationOnly {
        what: String,
        agent: usize,
        k: usize,
    },

    #[error("invalid parameters for {what}: {reason}")]
    InvalidParameters { what: String, reason: String },

    #[error("probability {p} violates the {which} bound {bound} for sums (R={sum_r}, L={sum_l})")]
    ProbabilityBoundViolated {
        p: f64,
        bound: f64,
        which: &'static str,
        sum_r: u64,
        sum_l: u64,
    },

    #[error("unknown mechanism {name:?}; known: {known}")]
    UnknownMechanism { name: String, known: String },

    #[error("bad mechanism spec {spec:?}: {reason}")]
    BadMechanismSpec { spec: String, reason: String },

    // -- verification ------------------------------------------------------
    #[error("expected one deviation set per agent ({n}), got {got}")]
    DeviationSetCount { n: usize, got: usize },

    #[error("deviation set for agent {agent} is empty")]
    EmptyDeviationSet { agent: usize },

    #[error("{what} needs a deterministic mechanism; {mechanism} returned a non-degenerate lottery")]
    RandomizedUnsupported { what: &'static str, mechanism: String },

    #[error("invalid sweep grid: {reason}")]
    BadSweepGrid { reason: String },

    #[error("grid check would scan {pairs} profile pairs (cap {cap}); pass allow_large to override")]
    GridTooLarge { pairs: u128, cap: u128 },

    // -- instance files ------------------------------------------------------
    #[error("failed to read {path}: {source}")]
    ReadInstance {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write {path}: {source}")]
    WriteInstance {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed instance JSON at line {line}, column {column}: {message}")]
    ParseInstance {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid instance: {reason}")]
    InvalidInstance { reason: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
