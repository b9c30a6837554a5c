use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("data length {len} does not match {rows}x{cols}")]
    DataLength { len: usize, rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rank {k} out of range 1..={max}")]
    RankOutOfRange { k: usize, max: usize },

    #[error("rank deficiency: only {found} independent columns found, {requested} requested")]
    RankDeficient { found: usize, requested: usize },

    #[error("singular basis at step {step}")]
    SingularBasis { step: usize },

    #[error("projector undefined for this index set")]
    ProjectorUndefined,

    #[error("numerically singular selection submatrix")]
    SingularSubmatrix,

    #[error("interpolatory U undefined: selected submatrix is singular")]
    InterpolatoryUndefined,

    #[error("selected {side} are dependent")]
    DependentSelection { side: &'static str },

    #[error("only {nonzero} nonzero scores available, {k} selections requested")]
    InsufficientScores { nonzero: usize, k: usize },

    #[error("duplicate index {0} in selection")]
    DuplicateIndex(usize),

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("column length {found} does not match expected {expected}")]
    ColumnLengthMismatch { expected: usize, found: usize },

    #[error("empty column stream")]
    EmptyStream,

    #[error("stream contains no independent columns")]
    ZeroRank,

    #[error("growth case requires m > k, got m = {m}, k = {k}")]
    GrowthTooSmall { m: usize, k: usize },

    #[error("growth case requires k >= 2, got k = {k}")]
    GrowthRankTooSmall { k: usize },

    #[error("malformed Matrix Market header: {0}")]
    MalformedHeader(String),

    #[error("unsupported Matrix Market field '{0}' (only real and integer are handled)")]
    UnsupportedField(String),

    #[error("unsupported Matrix Market symmetry '{0}' (only general and symmetric are handled)")]
    UnsupportedSymmetry(String),

    #[error("malformed Matrix Market data: {0}")]
    MalformedData(String),

    #[error("invalid sparse-sum spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
