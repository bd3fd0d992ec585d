use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("adjacency matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("adjacency matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("adjacency entry ({i}, {j}) is negative")]
    NegativeWeight { i: usize, j: usize },
    #[error("adjacency diagonal entry {0} is nonzero (self-loop)")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("vertex index {index} out of range for {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("eigen-decomposition failed to converge")]
    DecompositionFailed,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid time axis: {0}")]
    InvalidAxis(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid frequency band: {0}")]
    InvalidBand(String),
    #[error("no grid point falls inside the requested interval")]
    EmptySupport,
    #[error("band edge {edge} reaches the grid Nyquist rate {nyquist}")]
    NyquistViolation { edge: f64, nyquist: f64 },
    #[error("subset is empty")]
    EmptySubset,
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("power iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("atoms are linearly dependent (smallest Gram eigenvalue {0:e})")]
    RankDeficient(f64),
    #[error("signal has zero norm")]
    ZeroSignal,
    #[error("leading eigenvalue {0} is degenerate (0 or 1)")]
    DegenerateSpectrum(f64),
    #[error("inverse cosine argument {0} outside [0, 1]")]
    DomainError(f64),
    #[error("requested {requested} atoms but the subspace rank is {available}")]
    RankExceeded { requested: usize, available: usize },
    #[error("invalid dictionary parameters: {0}")]
    InvalidSpec(String),
    #[error("observations carry no energy")]
    InsufficientData,
    #[error("validation samples carry no energy")]
    ZeroValidationEnergy,
    #[error("retraction failed: stepped basis is rank deficient")]
    RetractionFailure,
    #[error("Laplacian is identically zero")]
    ZeroMatrix,
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
