use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation is not available in characteristic zero")]
    UnsupportedInCharZero,
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no root in the coefficient field: {0}")]
    NoRootInField(String),
    #[error("series is not a unit")]
    NotAUnit,
    #[error("leading coefficient of the divisor is not a unit")]
    LeadingCoefficientNotUnit,
    #[error("polynomials share a common factor (zero resultant)")]
    CommonFactor,
    #[error("degree bound {0} exhausted before the standard basis was complete")]
    BoundExhausted(u32),
    #[error("ideal is not primary to the maximal ideal")]
    NotPrimary,
    #[error("singularity is not isolated")]
    NotIsolated,
    #[error("a larger coefficient field is required: {0}")]
    ExtensionRequired(String),
    #[error("curve is reducible: {0}")]
    Reducible(String),
    #[error("characteristic divides the root index {0}")]
    CharacteristicDividesIndex(u64),
    #[error("approximate-root tower invariant violated at level {level}: {detail}")]
    TowerInvariantViolated { level: usize, detail: String },
    #[error("{0} is not in the semigroup")]
    NotInSemigroup(u64),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("characteristic divides the pure Y-power exponent {0}")]
    CharacteristicDividesR(u32),
    #[error("no pure power of Y with nonzero coefficient")]
    NoPureYTerm,
    #[error("characteristic divides the multiplicity {0}")]
    CharacteristicDividesMultiplicity(u32),
    #[error("semigroup computations disagree: {0}")]
    SemigroupMismatch(String),
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
