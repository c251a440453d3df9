use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension vectors are indexed by different vertex sets")]
    MismatchedVertexSets,
    #[error("quiver is not of extended Dynkin type D~n: {0}")]
    NotDTilde(&'static str),
    #[error("{0} is not a vertex of the quiver")]
    NoSuchVertex(String),
    #[error("({arrow},{t},{s}) is not a relevant triple")]
    NotARelevantTriple { arrow: String, t: u32, s: u32 },
    #[error("vertex {0} is neither a sink nor a source")]
    NotSinkOrSource(String),
    #[error("basis size mismatch at vertex {vertex}: expected {expected}, got {got}")]
    BasisSizeMismatch {
        vertex: String,
        expected: usize,
        got: usize,
    },
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("not an automorphism of this diagram: {0}")]
    InvalidAutomorphism(String),
    #[error("dimension vector out of range: {0}")]
    DimOutOfRange(String),
    #[error("weight {0} is not invertible modulo {1}")]
    WeightNotInvertible(String, u64),
    #[error("division by zero in exact arithmetic")]
    DivisionByZero,
    #[error("unsupported prime power q={0} (supported: 2, 3, 5, 7, 11, 13)")]
    UnsupportedPrime(u64),
    #[error("not a verified affine paving: {0} cell(s) left undetermined")]
    UndeterminedCells(usize),
    #[error("{0}")]
    Parse(String),
    #[error("patchwork violation: {0}")]
    Patchwork(String),
    #[error("extremal path is not pure: {0}")]
    ImpurePath(String),
}
