use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate doc_id `{doc_id}` at {path}:{first_line} and {path}:{second_line}")]
    DuplicateDocId {
        path: PathBuf,
        doc_id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("duplicate feedback entry for topic `{topic_id}` round {round}")]
    DuplicateFeedback { topic_id: String, round: u8 },

    #[error("internal consistency: feature `{feature}` present in document but df=0")]
    DfInconsistent { feature: String },

    #[error("infeasible synthetic spec: {0}")]
    InfeasibleSynthSpec(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("unknown topic `{0}`")]
    UnknownTopic(String),

    #[error("feedback replay has no entry for topic `{topic_id}` round {round}")]
    MissingFeedback { topic_id: String, round: u8 },

    #[error("non-finite loss during optimization: {0}")]
    NonFiniteLoss(String),

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
