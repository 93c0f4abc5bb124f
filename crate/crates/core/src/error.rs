//! Error type shared across the library.
//!
//! Every constructor and solver returns `Result<_, Error>`; variants carry
//! enough context to name the offending vertex, edge, subset, or constant.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("edge list is empty")]
    EmptyEdgeList,

    #[error("negative weight {weight} on edge ({u}, {v})")]
    NegativeWeight { u: String, v: String, weight: f64 },

    #[error("self-loop with nonzero weight {weight} at vertex {v}")]
    SelfLoop { v: String, weight: f64 },

    #[error("conflicting duplicate edge ({u}, {v}): weights {first} and {second}")]
    ConflictingEdge {
        u: String,
        v: String,
        first: f64,
        second: f64,
    },

    #[error("unknown vertex {label}")]
    UnknownVertex { label: String },

    #[error("edge file line {line}: {message}")]
    EdgeListParse { line: usize, message: String },

    #[error("cannot parse {text:?} as a complex value")]
    ComplexParse { text: String },

    #[error("signal file: {message}")]
    SignalParse { message: String },

    #[error("signal length {got} does not match vertex count {expected}")]
    SignalLength { expected: usize, got: usize },

    #[error("vertex subset is empty")]
    EmptySubset,

    #[error("subset index {index} out of range (graph has {size} vertices)")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("graph must be connected with at least two vertices")]
    DisconnectedGraph,

    #[error("cover does not exhaust the vertex set; missing vertices: {missing:?}")]
    CoverMissingVertices { missing: Vec<String> },

    #[error("edge ({u}, {v}) lies in subsets {first} and {second}")]
    CoverSharedEdge {
        u: String,
        v: String,
        first: usize,
        second: usize,
    },

    #[error("cover subset {index} induces a disconnected graph")]
    CoverDisconnectedSubset { index: usize },

    #[error("cover subset {index} has fewer than two vertices")]
    CoverSubsetTooSmall { index: usize },

    #[error("cover subset {index} lists vertex {label} twice")]
    CoverDuplicateVertex { index: usize, label: String },

    #[error("functional {index}: support reaches outside its subset (vertex {label})")]
    FunctionalOutsideSubset { index: usize, label: String },

    #[error("functional {index} is identically zero")]
    FunctionalZero { index: usize },

    #[error("functional {index} annihilates the subset indicator (sum of weights is zero)")]
    FunctionalZeroMean { index: usize },

    #[error("functional count {got} does not match subset count {expected}")]
    FunctionalCount { expected: usize, got: usize },

    #[error("functional {index} assigned twice")]
    FunctionalReassigned { index: usize },

    #[error("functional {index} missing")]
    FunctionalMissing { index: usize },

    #[error("bandwidth {omega} is negative")]
    NegativeBandwidth { omega: f64 },

    #[error("epsilon must be positive, got {epsilon}")]
    NonPositiveEpsilon { epsilon: f64 },

    #[error("power {s} of the Laplacian undefined: signal has a kernel component of relative size {kernel_mass:.3e}")]
    KernelComponent { s: f64, kernel_mass: f64 },

    #[error("Paley-Wiener space for bandwidth {omega} is empty")]
    TrivialPwSpace { omega: f64 },

    #[error("analysis operator is not a frame on this Paley-Wiener space (lower bound {lower:.3e})")]
    NotAFrame { lower: f64 },

    #[error("relaxation {rho} outside the convergent range (0, {limit})")]
    InvalidRelaxation { rho: f64, limit: f64 },

    #[error("frame operator is singular and cannot be inverted")]
    SingularFrameOperator,

    #[error("sample count {got} does not match functional count {expected}")]
    SampleCount { expected: usize, got: usize },

    #[error("spline order must be at least 1, got {k}")]
    InvalidSplineOrder { k: usize },

    #[error("convergence orders must be powers of two, got {k}")]
    NotPowerOfTwo { k: usize },

    #[error("interpolation constraints are inconsistent (residual {residual:.3e})")]
    InfeasibleConstraints { residual: f64 },

    #[error("linear system too ill-conditioned to solve reliably (estimate {estimate:.3e})")]
    IllConditioned { estimate: f64 },

    #[error("smoothness seminorm is degenerate on the constraint null space")]
    DegenerateSeminorm,

    #[error("bandwidth {omega} outside the admissible range (0, {limit})")]
    InadmissibleBandwidth { omega: f64, limit: f64 },

    #[error("signal is not bandlimited to {omega}: out-of-band mass {mass:.3e}")]
    NotBandlimited { omega: f64, mass: f64 },

    #[error("doubling-lemma base case fails: |f| = {lhs:.6e} > {rhs:.6e} = a |Af|")]
    DoublingBaseFails { lhs: f64, rhs: f64 },

    #[error("{context}: dimension mismatch ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("lattice size {n} is not divisible by 3")]
    NotTripleSized { n: usize },

    #[error("lattice size {n} too small for kind {kind}")]
    LatticeTooSmall { n: usize, kind: String },

    #[error("io: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
