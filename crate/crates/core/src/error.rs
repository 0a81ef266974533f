use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtError {
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("ambient dimensions differ ({0} vs {1})")]
    AmbientMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("operation needs a nonzero subspace")]
    EmptySubspace,
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("relation is not selfadjoint")]
    NotSelfadjoint,
    #[error("relation is not symmetric")]
    NotSymmetric,
    #[error("relation is not nonnegative")]
    NotNonnegative,
    #[error("relation is not selfadjoint and nonnegative")]
    NotSelfadjointNonnegative,
    #[error("point {re}{im:+}i hits the spectrum")]
    SpectrumHit { re: f64, im: f64 },
    #[error("operator is not a contraction (norm {0:.6})")]
    NotContraction(f64),
    #[error("invalid Hermitian contraction: {0}")]
    InvalidContraction(String),
    #[error("vector or subspace lies outside the form domain (residual {0:.3e})")]
    DomainViolation(f64),
    #[error("internal cross-check failed: {0}")]
    InternalMismatch(String),
    #[error("operator is not supported on the gap range (residual {0:.3e})")]
    SupportViolation(f64),
    #[error("unknown instance name `{0}`")]
    UnknownName(String),
    #[error("pair is not ordered (B0 <= B1 fails)")]
    OrderViolation,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("matrix is not an extension of the base contraction (residual {0:.3e})")]
    NotExtension(f64),
    #[error("kernel must be trivial: {0}")]
    KernelViolation(String),
    #[error("map is not a bijection onto the defect subspace")]
    NotBijection,
    #[error("-M(-1) is not positive definite")]
    NotInverseStieltjesSample,
    #[error("pair does not satisfy the restriction conditions")]
    PairNotConforming,
    #[error("operator -Gamma1 Gamma0(-1) + I is not positive definite")]
    SingularGram,
    #[error("Gamma0(-1) is not in the range of the gap root (residual {0:.3e})")]
    FactorizationResidual(f64),
    #[error("completed main transform is not selfadjoint")]
    CompletionNotSelfadjoint,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("invalid tolerance policy: {0}")]
    InvalidPolicy(String),
}

pub type Result<T> = std::result::Result<T, ExtError>;
