use thiserror::Error;

use crate::ring::ElementClass;

/// Errors raised by ring arithmetic, sequence evaluation and the factorization machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("descriptor mismatch: {left} vs {right}")]
    DescriptorMismatch { left: String, right: String },

    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("{value} is not a unit ({witness})")]
    NotAUnit { value: String, witness: String },

    #[error("ring has no multiplicative identity")]
    NoIdentity,

    #[error("ring {0} is not finite")]
    InfiniteRing(String),

    #[error("{0} has no square root in the ring")]
    NoSquareRoot(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("type error: {0}")]
    Type(String),

    #[error("evaluation failed at n = {n}: {message}")]
    Eval { n: usize, message: String },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid recurrence: {0}")]
    InvalidRecurrence(String),

    #[error("term {n} cannot be generated: it needs the inverse of term {culprit}, which is {class}")]
    NonUnitTerm {
        n: usize,
        culprit: usize,
        class: ElementClass,
    },

    #[error("eigensequence exhausted: no term r_{0}")]
    Exhausted(usize),

    #[error("not an eigensequence: characteristic residual at n = {n} is {residual}")]
    NotAnEigensequence { n: usize, residual: String },

    #[error("hypothesis violated at n = {n}{}: {message}", point.map(|p| format!(", grid point {p}")).unwrap_or_default())]
    HypothesisViolated {
        n: usize,
        point: Option<usize>,
        message: String,
    },

    #[error("cascade stage {depth} failed: {reason}")]
    StageFailed { depth: usize, reason: String },

    #[error("wrong region at grid point {point}: {message}")]
    WrongRegion { point: usize, message: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("factorized solution disagrees with direct iteration at n = {n}: {expected} vs {actual}")]
    OracleMismatch {
        n: usize,
        expected: String,
        actual: String,
    },

    #[error("horizon {requested} exceeds the limit {limit}")]
    HorizonTooLarge { requested: usize, limit: usize },
}

impl Error {
    /// Short machine-readable tag used in structured CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DescriptorMismatch { .. } => "descriptor_mismatch",
            Error::InvalidDescriptor(_) => "invalid_descriptor",
            Error::NotAUnit { .. } => "not_a_unit",
            Error::NoIdentity => "no_identity",
            Error::InfiniteRing(_) => "infinite_ring",
            Error::NoSquareRoot(_) => "no_square_root",
            Error::Parse { .. } => "parse_error",
            Error::Type(_) => "type_error",
            Error::Eval { .. } => "evaluation_error",
            Error::InvalidValue(_) => "invalid_value",
            Error::InvalidRecurrence(_) => "invalid_recurrence",
            Error::NonUnitTerm { .. } => "non_unit_term",
            Error::Exhausted(_) => "exhausted",
            Error::NotAnEigensequence { .. } => "not_an_eigensequence",
            Error::HypothesisViolated { .. } => "hypothesis_violated",
            Error::StageFailed { .. } => "stage_failed",
            Error::WrongRegion { .. } => "wrong_region",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::OracleMismatch { .. } => "oracle_mismatch",
            Error::HorizonTooLarge { .. } => "horizon_too_large",
        }
    }

    /// True for errors caused by malformed input rather than by the mathematics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::DescriptorMismatch { .. }
                | Error::InvalidDescriptor(_)
                | Error::Parse { .. }
                | Error::Type(_)
                | Error::InvalidValue(_)
                | Error::InvalidRecurrence(_)
                | Error::GridMismatch(_)
                | Error::HorizonTooLarge { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
