use thiserror::Error;

pub type Result<T> = std::result::Result<T, InlsError>;

#[derive(Debug, Error)]
pub enum InlsError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("singular weight: {0}")]
    SingularWeight(String),

    #[error("division by zero: {0}")]
    ZeroDenominator(String),

    #[error("shooting bracket not found in [{lo:e}, {hi:e}]")]
    BracketNotFound { lo: f64, hi: f64 },

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("field support escapes the box: {0}")]
    SupportEscapes(String),

    #[error("boundary contamination: {0}")]
    BoundaryContamination(String),

    #[error("mass mismatch: {0}")]
    MassMismatch(String),

    #[error("negative energy at critical mass: E = {0:e}")]
    NegativeEnergy(f64),

    #[error("time out of range: {0}")]
    TimeOutOfRange(String),

    #[error("unresolvable on this grid: {0}")]
    Unresolvable(String),

    #[error("check not applicable: {0}")]
    NotApplicable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config validation error in `{field}`: {message}")]
    ConfigValidation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl InlsError {
    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        InlsError::ConfigValidation {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// True for errors caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            InlsError::NonFinite(_)
                | InlsError::BracketNotFound { .. }
                | InlsError::NotConverged { .. }
                | InlsError::ZeroDenominator(_)
                | InlsError::NegativeEnergy(_)
                | InlsError::BoundaryContamination(_)
        )
    }
}
