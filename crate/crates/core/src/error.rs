use thiserror::Error;

use crate::treebank::Constituent;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("label or word {0:?} may not contain whitespace or parentheses")]
    InvalidSymbol(String),

    #[error("sentence has no tokens left after pruning")]
    EmptyAfterPruning,

    #[error("crossing brackets {0} and {1}")]
    CrossingBrackets(Constituent, Constituent),

    #[error("sentence length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("ensemble size mismatch: model has {expected} parsers, got {found}")]
    EnsembleSize { expected: usize, found: usize },

    #[error("limit exceeded: {0}")]
    Limit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("learner: {0}")]
    Learner(String),

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("external parser: {0}")]
    External(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
