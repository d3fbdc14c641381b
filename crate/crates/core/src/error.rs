use thiserror::Error;

use crate::ast::Pos;

/// A lexing or parsing failure.
///
/// `incomplete` is set when the input ended inside an open bracket or string,
/// i.e. more input could still make it well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
    pub incomplete: bool,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into(), incomplete: false }
    }

    pub(crate) fn eof(pos: Pos, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into(), incomplete: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable '{0}'")]
    Unbound(String),
    #[error("unbound variable '{name}_{key}': no entry for index {key}")]
    MissingIndex { name: String, key: i64 },
    #[error("type error: expected {expected}, found {found}")]
    Type { expected: &'static str, found: String },
    #[error("arity mismatch: {callee} expects {expected} argument(s), got {got}")]
    Arity { callee: String, expected: String, got: usize },
    #[error("integer overflow")]
    Overflow,
    #[error("divergent binding: value depends on itself")]
    Divergent,
    #[error("no matching clause")]
    NoMatchingClause,
    #[error("no matcher clause for pattern {0}")]
    NoMatcherClause(String),
    #[error("no data clause matches target {0}")]
    NoDataClause(String),
    #[error("ellipsis outside loop")]
    EllipsisOutsideLoop,
    #[error("something can handle only wildcards and pattern variables, got {0}")]
    SomethingPattern(String),
    #[error("{0}")]
    Other(String),
}

impl EvalError {
    pub(crate) fn other(message: impl Into<String>) -> Self {
        EvalError::Other(message.into())
    }
}

pub type EvalResult<T> = Result<T, EvalError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Eval(#[from] EvalError),
}
