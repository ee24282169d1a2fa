use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    ZeroInverse,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error("mixed fields: {0}")]
    MixedFields(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("subspace is the full algebra")]
    ImproperSubspace,
    #[error("budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("sigma condition failed: {0}")]
    SigmaConditionFailed(String),
    #[error("u*w vanishes")]
    ProductZero,
    #[error("matrix not in the required block: {0}")]
    BadBlocks(String),
    #[error("rank {r} out of range for n = {n}")]
    RankOutOfRange { r: usize, n: usize },
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("invalid part index {0}")]
    InvalidPart(usize),
    #[error("direction already lies in the subspace")]
    DirectionInV,
    #[error("internal contract violation: {0}")]
    InternalContractViolation(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("subspace is not a Mathieu-Zhao subspace")]
    NotAnMs,
    #[error("parameter violation: {0}")]
    ParameterViolation(String),
    #[error("matrix is not a nonzero square-zero nilpotent")]
    NotNilpotent,
    #[error("parameter is a square in the base field")]
    SquareParameter,
    #[error("parameter must differ from 0, 1 and -1")]
    ExcludedParameter,
    #[error("literal: {0}")]
    Literal(String),
}
