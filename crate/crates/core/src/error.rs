use thiserror::Error;

use crate::model::Diagnostic;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("value `{value}` is not in the range of `{var}`")]
    ValueOutOfRange { var: String, value: String },

    #[error("variable `{0}` is exogenous; an endogenous variable is required here")]
    NotEndogenous(String),

    #[error("the world is not a solution of the model")]
    NotASolution,

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid model: {}", summarize(.0))]
    InvalidModel(Vec<Diagnostic>),

    #[error("enumeration too large: {0}")]
    TooLarge(String),

    #[error("{0}")]
    Semantic(String),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags.iter().filter(|d| d.is_error()).map(|d| d.message.as_str()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn semantic(msg: impl Into<String>) -> Self {
        Error::Semantic(msg.into())
    }

    /// True for errors caused by malformed input text rather than by its meaning.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
