use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classes of failure, used by front ends to pick exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input: syntax, unknown names, nesting, file format.
    Input,
    /// The model or constraint set admits no (finite) solution.
    Inconsistent,
    /// A configured size cap was exceeded.
    Cap,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),

    #[error("nested modal operator at {path}: belief bodies must be propositional")]
    NestedBelief { path: String },

    #[error("expected a propositional formula, found a belief operator")]
    NotPropositional,

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("vocabulary has {size} propositions, cap is {cap}")]
    VocabularyCap { size: usize, cap: usize },

    #[error("situation enumeration over {size} propositions exceeds the oracle cap of {cap}")]
    OracleCap { size: usize, cap: usize },

    #[error("knowledge base has {count} finite-weight entries, cap is {cap}")]
    EntryCap { count: usize, cap: usize },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("hard constraints are inconsistent: no situation satisfies all of them")]
    InconsistentHardConstraints,

    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,

    #[error(
        "invalid target {target} for constraint {index}: targets must lie strictly between 0 and 1"
    )]
    InvalidTarget { index: usize, target: f64 },

    #[error("constraint {index} is infeasible: {reason}")]
    Infeasible { index: usize, reason: String },

    #[error(
        "weight fitting did not converge after {iterations} iterations (gradient norm {gradient_norm:e})"
    )]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
        weights: Vec<f64>,
    },

    #[error("simple conjunction is inconsistent: {0}")]
    InconsistentConjunction(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::VocabularyCap { .. } | Error::OracleCap { .. } | Error::EntryCap { .. } => {
                ErrorClass::Cap
            }
            Error::InconsistentHardConstraints
            | Error::ZeroProbabilityCondition
            | Error::Infeasible { .. }
            | Error::NotConverged { .. }
            | Error::InconsistentConjunction(_) => ErrorClass::Inconsistent,
            _ => ErrorClass::Input,
        }
    }
}
