use thiserror::Error;

use crate::diagram::ObjectType;
use crate::morphism::Backend;
use crate::text::SourceSpan;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at {span}: {message}")]
    Syntax { message: String, span: SourceSpan },

    #[error("unknown generator `{name}`{}", fmt_span(.span))]
    UnknownGenerator {
        name: String,
        span: Option<SourceSpan>,
    },

    #[error("unknown object `{name}`")]
    UnknownObject { name: String },

    #[error("type mismatch at {path}: left codomain {left} does not match right domain {right}")]
    TypeMismatch {
        path: String,
        left: ObjectType,
        right: ObjectType,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("generator `{generator}` has no {backend} payload")]
    MissingPayload { generator: String, backend: Backend },

    #[error("{what} is not supported by the {backend} backend")]
    Unsupported { what: &'static str, backend: Backend },

    #[error("invalid payload for generator `{generator}`: {reason}")]
    InvalidPayload { generator: String, reason: String },

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("morphism is not quasi-total")]
    NotQuasiTotal,

    #[error("morphisms are not related by the conditional preorder")]
    NotComparable,

    #[error("search space too large: {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn fmt_span(span: &Option<SourceSpan>) -> String {
    match span {
        Some(s) => format!(" at {s}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}
