use thiserror::Error;

/// Errors raised by the encoding state machine and the inverse walk.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("key must be at least 2")]
    KeyTooSmall,
    #[error("data must be strictly greater than the key")]
    DataNotGreaterThanKey,
    #[error("encryption did not terminate within {max_ops} operations")]
    NonTerminating { max_ops: usize },

    #[error("mutate requires a non-zero operand")]
    InvalidMutate,
    #[error("replicate is not defined on \"0\"")]
    InvalidReplicate,
    #[error("multiply requires an operand of at least 1")]
    InvalidMultiply,
    #[error("augment is only defined on \"0\"")]
    InvalidAugment,

    #[error("token {index}: value does not match the replicated operand")]
    ReplicateMismatch { index: usize },
    #[error("token {index}: value is not a perfect square")]
    MultiplyMismatch { index: usize },
    #[error("token {index}: augment expects \"01\"")]
    AugmentMismatch { index: usize },
    #[error("token {index}: remainder is not reduced below the key")]
    RemainderNotReduced { index: usize },

    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A violation of the complete-trace shape.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("trace is empty")]
    Empty,
    #[error("trace must start with a mutate with non-zero quotient")]
    BadHead,
    #[error("trace must end with replicate then mutate")]
    BadTail,
    #[error("trace contains no multiply")]
    MissingMultiply,
    #[error("token {index}: augment must sit between a mutate and a replicate")]
    MisplacedAugment { index: usize },
    #[error("token {index}: replicate must be followed by a mutate")]
    UnmatchedReplicate { index: usize },
    #[error("token {index}: zero quotient is only valid directly after a replicate")]
    ZeroQuotient { index: usize },
    #[error("final remainder is not canonical")]
    NonCanonicalRemainder,
}

impl StructureError {
    /// Token index the violation points at, if it is local to one token.
    pub fn token_index(&self) -> Option<usize> {
        match *self {
            StructureError::MisplacedAugment { index }
            | StructureError::UnmatchedReplicate { index }
            | StructureError::ZeroQuotient { index } => Some(index),
            _ => None,
        }
    }
}
