//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("empty access structure")]
    EmptyStructure,

    #[error("empty authorized set")]
    EmptySet,

    #[error("player {0:?} does not appear in the declared player universe")]
    UnknownPlayer(String),

    #[error("no-cloning violation: authorized sets {0} and {1} are disjoint")]
    NoCloning(String, String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error(
        "strict mode requires a common player in class {{{class}}}; \
         rebuild with dealer-assisted mode"
    )]
    NoCommonPlayer { class: String },

    #[error("coalition is not authorized")]
    Unauthorized,

    #[error("coalition is authorized; a leakage report would be meaningless")]
    AuthorizedCoalition,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("register size cap exceeded: total dimension {required} exceeds cap {cap}")]
    DimensionCap { required: u128, cap: u128 },

    #[error("invalid protocol configuration: {0}")]
    InvalidConfig(String),

    #[error("decoding failure: {0}")]
    DecodingFailure(String),

    #[error("unknown oracle suite {0:?}")]
    UnknownSuite(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Domain refusals are expected protocol outcomes (unauthorized
    /// coalitions, aborts), distinct from malformed input or internal faults.
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Unauthorized | Error::AuthorizedCoalition)
    }
}
