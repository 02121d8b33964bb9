use thiserror::Error;

use crate::graph::ObjectId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("endpoint error: {0}")]
    Endpoint(String),

    #[error("object `{0}` not found")]
    NotFound(ObjectId),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        offset: usize,
        message: String,
        expected: Vec<String>,
    },

    #[error("variable `{0}` is not bound by the scope")]
    UnboundVariable(String),

    #[error("dependencies do not share a scope: `{0}` vs `{1}`")]
    ScopeMismatch(String, String),

    #[error("dependency is not strict: {0}")]
    NonStrict(String),

    #[error("dependency needs no transformation: {0}")]
    NothingToDo(String),

    #[error("graph violates `{dependency}` ({} witness pair(s))", witnesses.len())]
    UnsatisfiedDependency {
        dependency: String,
        witnesses: Vec<(String, String)>,
    },

    #[error("scope has {attrs} attributes, limit is {limit}")]
    SizeLimit { attrs: usize, limit: usize },

    #[error("conflicting values for `{key}` on `{object}`")]
    PropertyConflict { object: ObjectId, key: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse_at(
        source: &str,
        offset: usize,
        message: impl Into<String>,
        expected: Vec<String>,
    ) -> Self {
        let offset = offset.min(source.len());
        let before = &source[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            offset,
            message: message.into(),
            expected,
        }
    }
}
