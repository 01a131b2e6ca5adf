use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("ill-conditioned system: {0}")]
    IllConditioned(String),
    #[error("singular jacobian")]
    Singular,
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("derivative below threshold at seed")]
    CriticalPoint,
    #[error("orbit escaped the bound")]
    Escape,
    #[error("zero on the contour")]
    ZeroOnContour,
    #[error("precision exhausted at level {0}")]
    PrecisionExhausted(usize),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for LabError {
    fn from(e: serde_json::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
