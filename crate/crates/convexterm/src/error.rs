//! Crate-wide error type.

/// Everything that can go wrong when building or querying the structures in
/// this crate. Variants carry enough context to identify the offending input.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid rational literal {0:?}")]
    InvalidRational(String),

    #[error("coefficient {0} outside the open interval (0,1)")]
    CoefficientRange(String),

    #[error("coefficients must sum to 1, got {0}")]
    CoefficientSum(String),

    #[error("length mismatch: {left} coefficients vs {right} elements")]
    LengthMismatch { left: usize, right: usize },

    #[error("element outside carrier: {0}")]
    OutsideCarrier(String),

    #[error("operation requires a finite carrier")]
    InfiniteCarrier,

    #[error("duplicate element in carrier: {0}")]
    DuplicateElement(String),

    #[error("not a meet-semilattice: {0}")]
    NotMeetSemilattice(String),

    #[error("invalid order relation: {0}")]
    InvalidOrder(String),

    #[error("fiber family violation: {0}")]
    FiberFamily(String),

    #[error("subset is not a prime ideal: {0}")]
    NotPrime(String),

    #[error("gluing compatibility violated: {0}")]
    GlueCompatibility(String),

    #[error("inner extension adheres where it may not: {0}")]
    InnerAdherence(String),

    #[error("extension parameter must be extremal: {0}")]
    NonExtremal(String),

    #[error("parameter lies outside the carrier: {0}")]
    OutsideDomain(String),

    #[error("parameter needs at least two points")]
    SingletonParameter,

    #[error("input must not be a single point")]
    SingletonInput,

    #[error("unsupported dimension {0} for this operation")]
    UnsupportedDimension(usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),

    #[error("invalid face flags: {0}")]
    InvalidFlags(String),

    #[error("invalid probabilistic automaton: {0}")]
    InvalidPa(String),

    #[error("extension not supported here: {0}")]
    UnsupportedExtension(String),

    #[error("unknown action {0:?}")]
    UnknownAction(String),

    #[error("unknown state {0:?}")]
    UnknownState(String),

    #[error("recovered parameter is not a distribution: {0}")]
    NotADistribution(String),

    #[error("oracle behaves inconsistently: {0}")]
    InconsistentOracle(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
