use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, found: usize },
    #[error("matrix shapes do not match")]
    ShapeMismatch,
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector has no primitive form")]
    ZeroVector,
    #[error("points span an affine space of dimension {rank}, need {dim}")]
    DimensionDeficient { rank: usize, dim: usize },
    #[error("expected points in dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("coordinate magnitude exceeds the supported range")]
    CoordinateOverflow,
    #[error("polytope is not normal (witness {witness:?} in degree {degree})")]
    NotNormal { degree: u32, witness: Vec<i64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown gallery polytope `{0}`")]
    UnknownPolytope(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
