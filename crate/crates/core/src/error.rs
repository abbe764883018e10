use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdelicError {
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("no solution: target outside the column space")]
    NoSolution,
    #[error("slope pairing needs zero end slopes")]
    UnboundedSupport,
    #[error("no convex minorant: left slope exceeds right slope")]
    NoMinorant,
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no sections")]
    EmptySections,
    #[error("section is not effective: {0}")]
    InvalidSection(String),
    #[error("point lies in the support of the divisor")]
    SupportOverlap,
    #[error("point {0} has no resolved specialization on the model at p = {1}")]
    UnresolvedSpecialization(String, u64),
    #[error("monomial norm is infinite")]
    InfiniteNorm,
    #[error("not integrable: {0}")]
    NotIntegrable(String),
    #[error("not toric: {0}")]
    NotToric(String),
    #[error("support cannot be moved off the point")]
    SupportNotMovable,
    #[error("horizontal degree is negative")]
    NegativeDegree,
    #[error("no nef divisor lies below the input")]
    EmptyUpsilon,
    #[error("zero crossing of the concave transform is irrational")]
    IrrationalThreshold,
    #[error("lattice rank {0} exceeds the enumeration limit")]
    RankTooLarge(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, AdelicError>;
