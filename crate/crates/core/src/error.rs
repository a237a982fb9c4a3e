use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed embedding file at line {line}: {reason}")]
    MalformedEmbeddingFile { line: usize, reason: String },

    #[error("embedding table is empty")]
    EmptyTable,

    #[error("no token of the text is in the embedding vocabulary")]
    EmptyVocabularyOverlap,

    #[error("text too short: {n_vectors} embedded tokens, need at least {min_vectors} for max lag {tau_max}")]
    TextTooShort {
        n_vectors: usize,
        tau_max: usize,
        min_vectors: usize,
    },

    #[error("insufficient positive lags: {kept} usable lags spanning a factor of {span:.2} (need >= 10 lags over one decade)")]
    InsufficientPositiveLags { kept: usize, span: f64 },

    #[error("degenerate fit: regressor has zero variance over {n_points} points")]
    DegenerateFit { n_points: usize },

    #[error("exponential-law MAPE is zero while power-law MAPE is {mape_power}")]
    ZeroDenominator { mape_power: f64 },

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("invalid lag selection: {0}")]
    InvalidSelection(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for errors that describe the text or its curve rather than the
    /// environment (I/O, malformed inputs, bad configuration).
    pub fn is_metric_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyVocabularyOverlap
                | Error::TextTooShort { .. }
                | Error::InsufficientPositiveLags { .. }
                | Error::DegenerateFit { .. }
                | Error::ZeroDenominator { .. }
        )
    }

    /// Stable machine-readable code, used in service responses and records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "Io",
            Error::MalformedEmbeddingFile { .. } => "MalformedEmbeddingFile",
            Error::EmptyTable => "EmptyTable",
            Error::EmptyVocabularyOverlap => "EmptyVocabularyOverlap",
            Error::TextTooShort { .. } => "TextTooShort",
            Error::InsufficientPositiveLags { .. } => "InsufficientPositiveLags",
            Error::DegenerateFit { .. } => "DegenerateFit",
            Error::ZeroDenominator { .. } => "ZeroDenominator",
            Error::InvalidVector(_) => "InvalidVector",
            Error::InvalidSelection(_) => "InvalidSelection",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
