use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("axiom violation ({property}): {detail}")]
    Axiom { property: &'static str, detail: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("elements belong to different groupoid models")]
    ModelMismatch,

    #[error("point does not belong to this model: {0}")]
    ForeignPoint(String),

    #[error("not a unit: {0}")]
    NotAUnit(String),

    #[error("not contained: {0}")]
    NotContained(String),

    #[error("support escapes the target region: {0}")]
    SupportEscapes(String),

    #[error("the fiber is infinite (Z-headed snake); use the symbol norm for the base fiber")]
    InfiniteFiber,

    #[error("operation not available for this model: {0}")]
    WrongModel(String),

    #[error("epsilon must be positive")]
    InvalidEpsilon,

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("invalid bisection: {0}")]
    InvalidBisection(String),

    #[error("matrix dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("invalid expression: {0}")]
    Expression(String),

    #[error("algorithm invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. }
            | Error::UnknownName(_)
            | Error::InvalidBisection(_)
            | Error::Expression(_)
            | Error::ModelMismatch => 2,
            Error::Axiom { .. } => 3,
            Error::Io { .. } => 4,
            _ => 1,
        }
    }
}
