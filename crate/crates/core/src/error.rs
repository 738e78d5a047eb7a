use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("coefficient {value} at index {index} is outside {{-1, 0, 1}}")]
    CoefficientOverflow { index: usize, value: i64 },

    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("edge {0} joins a vertex to itself")]
    DegenerateEdge(usize),

    #[error("chain is not a cycle")]
    OpenChain,

    #[error("arrangement contains no bounded cell")]
    EmptyArrangement,

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("non-manifold input around cell {0}")]
    NonManifoldInput(usize),

    #[error("cycle extraction did not terminate: {0}")]
    NonTerminating(String),

    #[error("face {0} is not planar")]
    NonPlanarFace(usize),

    #[error("vertex cluster of diameter {diameter:e} exceeds tolerance {eps:e}")]
    ToleranceCollision { diameter: f64, eps: f64 },

    #[error("outer cycle is ambiguous")]
    AmbiguousOuter,

    #[error("point lies on the cycle")]
    PointOnBoundary,

    #[error("no cell contains component {0}")]
    ContainerNotFound(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
