use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operator/polynomial kind mismatch: {0}")]
    KindMismatch(String),
    #[error("not monogenic on the slice (residual {residual:e})")]
    NotMonogenic { residual: f64 },
    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point lies on the pole orbit: {0}")]
    Pole(String),
    #[error("ill-conditioned quadrature: {0}")]
    Conditioning(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
