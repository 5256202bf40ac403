use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variant names double as the stable error identifiers printed by the CLI
/// (see [`Error::name`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different cyclotomic fields (orders {left} and {right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("embedding index {k} is not coprime to the field order {order}")]
    NotAPrimitiveEmbedding { k: u64, order: u64 },
    #[error("the alternating q-bracket has a pole at q = -1")]
    PoleAtMinusOne,
    #[error("the power-sum closed form has a pole at w = 1")]
    PoleAtOne,
    #[error("series inversion needs a nonzero constant term")]
    NonUnitConstantTerm,
    #[error("coefficient {index} requested from a series truncated at order {order}")]
    OrderTooLow { index: usize, order: usize },
    #[error("invalid character: {reason}")]
    InvalidCharacter { reason: String },
    #[error("modulus {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("descent oracle limited to 1 <= n <= 9, got {0}")]
    OracleTooLarge(usize),
    #[error("functional equation is singular for these parameters")]
    SingularFunctionalEquation,
    #[error("parameters outside the p-adic convergence regime: {0}")]
    NotPadicallyConvergent(String),
    #[error("residual undefined: the denominator vanishes")]
    ResidualUndefined,
    #[error("series did not reach the tail bound within {max_terms} terms")]
    NotConverged { max_terms: usize },
    #[error("series evaluation needs q > 1")]
    OutsideConvergence,
    #[error("evaluation paths disagree at index {0}")]
    PathDisagreement(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable identifier of the variant, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "DivisionByZero",
            Error::FieldMismatch { .. } => "FieldMismatch",
            Error::NotAPrimitiveEmbedding { .. } => "NotAPrimitiveEmbedding",
            Error::PoleAtMinusOne => "PoleAtMinusOne",
            Error::PoleAtOne => "PoleAtOne",
            Error::NonUnitConstantTerm => "NonUnitConstantTerm",
            Error::OrderTooLow { .. } => "OrderTooLow",
            Error::InvalidCharacter { .. } => "InvalidCharacter",
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::OracleTooLarge(_) => "OracleTooLarge",
            Error::SingularFunctionalEquation => "SingularFunctionalEquation",
            Error::NotPadicallyConvergent(_) => "NotPadicallyConvergent",
            Error::ResidualUndefined => "ResidualUndefined",
            Error::NotConverged { .. } => "NotConverged",
            Error::OutsideConvergence => "OutsideConvergence",
            Error::PathDisagreement(_) => "PathDisagreement",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Parse(_) => "Parse",
        }
    }
}
