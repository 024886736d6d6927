use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("strand mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },
    #[error("parse error at token `{token}`: {reason}")]
    Parse { token: String, reason: String },
    #[error("convention mismatch: {left:?} vs {right:?}")]
    ConventionMismatch {
        left: crate::artin::Convention,
        right: crate::artin::Convention,
    },
    #[error("word length cap of {cap} letters exceeded")]
    LengthCap { cap: usize },
    #[error("Magnus truncation cap of degree {cap} reached without a nonzero term")]
    MagnusCap { cap: usize },
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("sign preservation check failed: {0}")]
    SignPreservation(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
