use thiserror::Error;

/// Errors raised by the estimation stack.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Pauli word {0:?}")]
    InvalidPauliWord(String),
    #[error("operator has no terms")]
    EmptyOperator,
    #[error("inconsistent qubit count: expected {expected}, found {found}")]
    InconsistentQubits { expected: usize, found: usize },
    #[error("non-finite coefficient for term {0}")]
    NonFiniteCoefficient(String),
    #[error("{0} qubits exceeds the dense limit of {max}", max = crate::MAX_QUBITS)]
    TooManyQubits(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("spectrum is identically zero")]
    ZeroSpectrum,
    #[error("ground state is degenerate: gap {gap:e} <= tolerance {tolerance:e}")]
    DegenerateGround { gap: f64, tolerance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mollifier requires tan(delta/2) <= 1 - 1/sqrt(2), got delta = {0}")]
    MollifierDomain(f64),
    #[error("mollifier degree {0} too low to resolve its width")]
    MollifierUnresolved(usize),
    #[error("Fourier approximation invariant violated: {0}")]
    FourierInvariant(String),
    #[error("no degree up to {cap} reaches the requested accuracy")]
    DegreeCapExceeded { cap: usize },
    #[error("observable norm {norm} exceeds block-encoding scale {alpha}")]
    NormExceedsAlpha { norm: f64, alpha: f64 },
    #[error("observable does not commute with the Hamiltonian (deviation {0:e})")]
    NotCommuting(f64),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("insufficient samples: need {needed}, have {available}")]
    InsufficientSamples { needed: usize, available: usize },
    #[error("binary search did not converge within {0} iterations")]
    BudgetExhausted(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("matrix is singular or ill-conditioned")]
    Singular,
    #[error("initial-state overlap {overlap} below floor {floor}")]
    OverlapBelowFloor { overlap: f64, floor: f64 },
    #[error("operator is not annihilated on the spurious null vector (residual {0:e})")]
    NullVectorLeak(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
