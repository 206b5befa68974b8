use thiserror::Error;

/// Errors raised by the exact-arithmetic kernels and the decision procedures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("hypersurface equation must be non-constant")]
    ConstantHypersurface,

    #[error("group too large or infinite (closure exceeded cap of {cap} elements)")]
    GroupTooLarge { cap: usize },

    #[error("conductor {conductor} exceeds the configured maximum {max}")]
    ConductorTooLarge { conductor: u32, max: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-square orbit map ({components} components on {variables} variables)")]
    NonSquareOrbitMap { components: usize, variables: usize },

    #[error("degenerate Jacobian: determinant vanishes identically")]
    DegenerateJacobian,

    #[error("not G-invariant")]
    NotInvariant,

    #[error("group is not generated by complex reflections")]
    NotReflectionGroup,

    #[error("adapted charts available for diagonal groups only; use lift_via_pullback")]
    NonDiagonal,

    #[error("cannot certify off-strata holomorphy: untracked denominator factor {0}")]
    CannotCertify(String),

    #[error("connection does not satisfy the adapted pole pattern")]
    PatternViolation,

    #[error("inverse map missing or does not invert the map")]
    InverseMismatch,

    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
