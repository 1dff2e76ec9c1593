use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid token label {0:?}")]
    InvalidToken(String),
    #[error("chain body must contain at least one token")]
    EmptyBody,
    #[error("duplicate chain id {0:?}")]
    DuplicateId(String),
    #[error("sentence contains no words")]
    EmptySentence,
    #[error("conclusion must be a category token, got word {0:?}")]
    WordConclusion(String),
    #[error("fresh chain must not carry a conclusion")]
    NotFresh,
    #[error("unknown chain id {0:?}")]
    UnknownChain(String),
    #[error("malformed complex: {0}")]
    MalformedComplex(String),
    #[error("store is not pure: chain {0:?} is neither word -> category nor a category pattern")]
    ImpureStore(String),
    #[error("parse tree does not fit the store: {0}")]
    TreeMismatch(String),
    #[error("no lexicon entry for word {0:?}")]
    UnknownWord(String),
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
