use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max |u†u - I| = {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subsystem dimensions {0}x{1} are not qubit registers")]
    NotQubits(usize, usize),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("locality violation: {0}")]
    Locality(String),

    #[error("state is not maximally correlated (off-pattern entry {0:e})")]
    NotMaxCorrelated(f64),

    #[error("state is not pure (purity {0})")]
    NotPure(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}
