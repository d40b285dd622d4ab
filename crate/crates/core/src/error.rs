use thiserror::Error;

/// Errors raised by the linear algebra kernel, the algebra model and the
/// seminorm routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("{routine} did not converge within {budget} iterations")]
    NoConvergence { routine: &'static str, budget: usize },

    #[error("element is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("power {alpha} is undefined: smallest eigenvalue {lambda_min:e} lies in the kernel")]
    SingularPower { alpha: f64, lambda_min: f64 },

    #[error("element is not invertible: smallest eigenvalue {lambda_min:e} <= rank tolerance {tau_rank:e}")]
    NotInvertible { lambda_min: f64, tau_rank: f64 },

    #[error("block structures do not match: {left:?} vs {right:?}")]
    StructureMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("block index {index} out of range for {blocks} blocks")]
    IndexOutOfRange { index: usize, blocks: usize },

    #[error("vector is not a unit vector: norm {norm}")]
    NotUnitVector { norm: f64 },

    #[error("the zero element has no range: equivalence constants are undefined")]
    ZeroElement,

    #[error("bad exponents alpha = {alpha}, beta = {beta}: {reason}")]
    BadExponents { alpha: f64, beta: f64, reason: &'static str },

    #[error("invalid block structure: {0}")]
    BadStructure(String),

    #[error("invalid generator or checker input: {0}")]
    BadSpec(String),

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
