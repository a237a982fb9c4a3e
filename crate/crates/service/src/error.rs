use thiserror::Error;

use crate::model::{ChallengePhase, ErrorBody};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("operation requires phase {required}, challenge is in {current}")]
    WrongPhase {
        current: ChallengePhase,
        required: ChallengePhase,
    },

    #[error("unknown prompt {0:?}")]
    UnknownPrompt(String),

    #[error("submission text does not start with the text of prompt {0:?}")]
    PromptPrefixMismatch(String),

    #[error("submission has {tokens} tokens, minimum is {min}")]
    TooShort { tokens: usize, min: usize },

    #[error("submission has {tokens} tokens, maximum is {max}")]
    TooLong { tokens: usize, max: usize },

    #[error("no submission is waiting for a rating from judge {0:?}")]
    NoWorkAvailable(String),

    #[error("{dimension} score {value} is outside 1..=5")]
    ScoreOutOfRange { dimension: &'static str, value: i64 },

    #[error("assignment {0:?} has already been rated")]
    DuplicateRating(String),

    #[error("unknown assignment {0:?}")]
    UnknownAssignment(String),

    #[error("unknown submission {0:?}")]
    UnknownSubmission(String),

    #[error("submission {0:?} has no ratings yet")]
    NoRatings(String),

    #[error("cannot move from phase {from} to {to}")]
    InvalidPhaseTransition {
        from: ChallengePhase,
        to: ChallengePhase,
    },

    #[error("missing or invalid admin token")]
    Unauthorized,

    #[error("bad request: {0}")]
    BadRequest(String),

    #[error("event log error: {0}")]
    Storage(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::WrongPhase { .. } => "WrongPhase",
            ServiceError::UnknownPrompt(_) => "UnknownPrompt",
            ServiceError::PromptPrefixMismatch(_) => "PromptPrefixMismatch",
            ServiceError::TooShort { .. } => "TooShort",
            ServiceError::TooLong { .. } => "TooLong",
            ServiceError::NoWorkAvailable(_) => "NoWorkAvailable",
            ServiceError::ScoreOutOfRange { .. } => "ScoreOutOfRange",
            ServiceError::DuplicateRating(_) => "DuplicateRating",
            ServiceError::UnknownAssignment(_) => "UnknownAssignment",
            ServiceError::UnknownSubmission(_) => "UnknownSubmission",
            ServiceError::NoRatings(_) => "NoRatings",
            ServiceError::InvalidPhaseTransition { .. } => "InvalidPhaseTransition",
            ServiceError::Unauthorized => "Unauthorized",
            ServiceError::BadRequest(_) => "BadRequest",
            ServiceError::Storage(_) => "Storage",
        }
    }

    pub fn body(&self) -> ErrorBody {
        ErrorBody {
            error: self.code().to_owned(),
            message: self.to_string(),
        }
    }
}

impl From<std::io::Error> for ServiceError {
    fn from(e: std::io::Error) -> Self {
        ServiceError::Storage(e.to_string())
    }
}
