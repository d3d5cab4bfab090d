use thiserror::Error;

use crate::syntax::Position;

/// Malformed expression text.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    #[error("position {0:?} does not address a subexpression")]
    InvalidPosition(Position),
    #[error("rule {rule} needs parameter `{parameter}`")]
    MissingParameter {
        rule: &'static str,
        parameter: &'static str,
    },
    #[error("no {rule} redex at position {position:?}")]
    NotARedex {
        rule: &'static str,
        position: Position,
    },
    #[error("atom `{0}` is not in the model's signature")]
    UnknownAtom(String),
    #[error("model atoms must include `@`")]
    MissingAtAtom,
    #[error("arithmetic overflow computing {0}")]
    Overflow(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
}

impl Error {
    /// Errors caused by a size cap or numeric width rather than bad input.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::Overflow(_) | Error::LimitExceeded(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
