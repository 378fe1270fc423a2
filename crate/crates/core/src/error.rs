use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by graph construction, exact linear algebra, chip moves,
/// enumeration guards, and quasipolynomial fitting.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph family: {0}")]
    InvalidFamily(String),
    #[error("malformed graph document: {0}")]
    MalformedGraph(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("edge ({0}, {1}) is invalid: {2}")]
    InvalidEdge(usize, usize, &'static str),
    #[error("graph must have at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("vertex index {index} out of range for {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,

    #[error("illegal chip-firing move: vertex {vertex} holds {chips} chips but has degree {degree}")]
    IllegalMove {
        vertex: usize,
        chips: String,
        degree: usize,
    },
    #[error("configuration entry {index} is negative: {value}")]
    NegativeChips { index: usize, value: String },
    #[error("malformed configuration {0:?}: {1}")]
    MalformedConfiguration(String, String),
    #[error("configuration has {got} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },

    #[error("empty sweep range: cmin {c_min} > cmax {c_max}")]
    EmptyRange { c_min: u64, c_max: u64 },
    #[error("resource limit exceeded: {kind} would need {needed} but the cap is {limit}")]
    ResourceLimit {
        kind: &'static str,
        needed: String,
        limit: u64,
    },
    #[error("feasible region is unbounded; the graph data is inconsistent")]
    UnboundedRegion,

    #[error("insufficient samples: residue {residue} mod {period} has {got} points, need {need}")]
    InsufficientSamples {
        residue: u64,
        period: u64,
        got: usize,
        need: usize,
    },
    #[error("evaluation point {c} is below the quasipolynomial onset {onset}")]
    BelowOnset { c: u64, onset: u64 },
    #[error("quasipolynomial evaluated to a non-integer at {c}; the fit is corrupt")]
    NonIntegerValue { c: u64 },
    #[error("invalid quasipolynomial shape: {0}")]
    BadQuasipolynomial(String),
}

impl Error {
    /// True for errors caused by a configured resource cap, as opposed to
    /// invalid input or a genuine mathematical failure.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit { .. })
    }
}
