use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("coordinate {index} = {value} lies outside [-1, 1]")]
    Domain { index: usize, value: f64 },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid Parisi path: {0}")]
    InvalidPath(String),

    #[error("negative covariance increment {value:e} for species {species} at level {level}")]
    NegativeIncrement {
        species: usize,
        level: usize,
        value: f64,
    },

    #[error("quadrature budget exceeded: {required} evaluation points > budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("inner minimisation failed to bracket for species {species}: {reason}")]
    Bracket { species: usize, reason: String },

    #[error("model is not balanced (max relative discrepancy {0:e})")]
    Unbalanced(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size over cap: {0}")]
    TooLarge(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in structured CLI error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid_model",
            Error::Domain { .. } => "domain",
            Error::UnknownSpecies(_) => "unknown_species",
            Error::Dimension(_) => "dimension",
            Error::InvalidPath(_) => "invalid_path",
            Error::NegativeIncrement { .. } => "negative_increment",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::Bracket { .. } => "bracket",
            Error::Unbalanced(_) => "unbalanced",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::TooLarge(_) => "too_large",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
