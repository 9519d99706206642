//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors raised by construction, parsing, and evaluation.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The level of the theory must be an odd prime.
    #[error("level must be an odd prime, got {0}")]
    InvalidLevel(u64),

    /// Two values built over different levels were combined.
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),

    /// A site name was not found in a state.
    #[error("unknown site `{0}`")]
    UnknownSite(String),

    /// A site (or component, or node) name was declared twice.
    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    /// Contraction or gate application requested on legs whose
    /// orientations do not admit it.
    #[error("orientation mismatch at site `{0}`")]
    OrientationMismatch(String),

    /// An operation received the wrong number of legs or sites.
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// Regions passed to an entanglement quantity must be disjoint.
    #[error("regions overlap at site `{0}`")]
    RegionOverlap(String),

    /// A representation label lies outside `0..k`.
    #[error("representation label {rep} out of range for level {k}")]
    InvalidRep { rep: i64, k: u64 },

    /// An evaluation that needs every boundary labeled found a bare one.
    #[error("component `{0}` carries no representation label")]
    MissingLabel(String),

    /// Brute-force summation over surgery components is capped.
    #[error("too many surgery components for brute-force summation: {got} > {max}")]
    SurgeryTooLarge { got: usize, max: usize },

    /// Exhaustive phase-space searches are capped at a small site count.
    #[error("too many sites for exhaustive group search: {got} > {max}")]
    SearchTooLarge { got: usize, max: usize },

    /// The presentation evaluates to the zero state and defines no state.
    #[error("ill-defined presentation: {0}")]
    IllDefined(String),

    /// Tableau generators fail commutation or independence.
    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    /// A state failed the stabilizer test required by the operation.
    #[error("state is not a stabilizer state")]
    NotStabilizer,

    /// A quantity that must be an integer came out non-integral.
    #[error("expected an integer value, got {0}")]
    NonInteger(f64),

    /// Rounding of a dimension fell outside the accepted residue.
    #[error("value {value} is not within {tol} of an integer")]
    RoundingFailure { value: f64, tol: f64 },

    /// Fusion-category data needs an odd prime `r ≥ 5`.
    #[error("fusion data needs an odd prime r >= 5, got {0}")]
    InvalidR(u64),

    /// Text input failed to parse.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// A tensor network is malformed (bad port, dangling leg, reused port).
    #[error("network error: {0}")]
    Network(String),

    /// Command-line usage error.
    #[error("usage error: {0}")]
    Usage(String),
}

/// Convenient alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}
