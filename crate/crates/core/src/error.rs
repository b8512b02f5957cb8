use crate::monoid::MonoidElement;

/// Errors surfaced by the monoid, product-system and Fock layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("element does not belong to the monoid: {0}")]
    DescriptorMismatch(String),

    #[error("exponent overflow in monoid multiplication")]
    ExponentOverflow,

    #[error("fibre dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: u64, cap: u64 },

    #[error("abelianisation is only defined on free products")]
    NotFreeProduct,

    #[error("grading by the abelianisation requires a free-product monoid")]
    ThetaGradingUnavailable,

    #[error("fibre base mismatch: {0}")]
    BaseMismatch(String),

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid multiplier: {0}")]
    InvalidMultiplier(String),

    #[error("element is not a member of the truncation: {0:?}")]
    NotInTruncation(MonoidElement),

    #[error("{0:?} is not left-divisible as required")]
    NotDivisible(MonoidElement),

    #[error("the requested join does not exist (no common upper bound)")]
    JoinInfinite,

    #[error("subset is not an initial segment of the given finite set")]
    NotInitialSegment,

    #[error("the identity element is not allowed here")]
    IdentityNotAllowed,

    #[error("relations must be verified before extending the representation")]
    UnverifiedRelations,

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
