use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid dimension `{0}` must be at least 1")]
    ZeroSize(&'static str),

    #[error("amplitude tensor has {actual} entries, grid requires {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("states or operators live on different grids")]
    GridMismatch,

    #[error("state has (near) zero quadrature norm")]
    ZeroNorm,

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("position lattice does not align with the modular grid: {0}")]
    LatticeMisaligned(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("mode index {mode} out of range for {n_modes} mode(s)")]
    BadMode { mode: usize, n_modes: usize },

    #[error("weight function is not real-valued: {0}")]
    NonRealWeight(String),

    #[error("target string `{0}` listed more than once")]
    DuplicateTarget(String),

    #[error("bad target specification: {0}")]
    BadTarget(String),

    #[error("cell weight {0} lies outside [-1, 1]")]
    WeightOutOfRange(f64),

    #[error("operator and state disagree on the ancilla bit")]
    AncillaMismatch,

    #[error("target count {m} is invalid for a list of {n} elements")]
    BadTargetCount { m: usize, n: usize },

    #[error("weights vanish on the envelope support (weighted mass {0:e})")]
    DegenerateWeights(f64),

    #[error("ambiguous association: {0:?} all exceed the threshold")]
    AmbiguousAssociation(Vec<String>),

    #[error("no logical state exceeds the association threshold")]
    NoAssociation,

    #[error("bad magic bytes in state file")]
    BadMagic,

    #[error("truncated state file: expected {expected} bytes, found {actual}")]
    TruncatedFile { expected: usize, actual: usize },

    #[error("invalid config at `{pointer}`: {message}")]
    ConfigInvalid { pointer: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
