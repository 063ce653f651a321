use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not a density matrix: {0}")]
    InvalidState(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("{what} of size {size} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("power iteration did not converge in {iterations} iterations (last estimate {estimate})")]
    NotConverged { iterations: usize, estimate: f64 },

    #[error("Young diagram with {height} rows does not fit in dimension {d}")]
    HeightExceedsDimension { height: usize, d: usize },

    #[error("inconsistent marginals: {0}")]
    InconsistentMarginals(String),

    #[error("coordinates violate the non-negativity constraints: {0}")]
    ConstraintViolation(String),

    #[error("the marginals are not joinable")]
    NotJoinable,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
