use thiserror::Error;

/// Errors raised by the library. Certificate rejections are not errors; see
/// [`crate::proofs::Rejection`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed rational `{0}`")]
    BadRational(String),
    #[error("probability {0} out of range: {1}")]
    ProbOutOfRange(String, &'static str),
    #[error("value {0} outside [0,1]")]
    OutOfUnitInterval(String),
    #[error("weights sum to {0}, expected 1")]
    WeightsNotNormalized(String),
    #[error("empty {0}")]
    Empty(&'static str),
    #[error("variable `{0}` is not mapped")]
    Unmapped(String),
    #[error("name `{0}` is not in the carrier")]
    NotInCarrier(String),
    #[error("duplicate carrier name `{0}`")]
    DuplicateName(String),
    #[error("invalid name `{0}`")]
    BadName(String),
    #[error("distance matrix has shape mismatch: {0}")]
    Shape(String),
    #[error("enumeration guard exceeded: {0}")]
    Guard(String),
    #[error("marginal mismatch: {0}")]
    Marginal(String),
    #[error("length mismatch: {0}")]
    Length(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("value {0} is not rational under this operator")]
    NotRational(String),
    #[error("no +_{0} operation in model")]
    MissingOperation(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
