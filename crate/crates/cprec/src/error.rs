//! Crate-wide error type.
//!
//! Variants are grouped by pipeline stage. The CLI maps the data errors,
//! training divergence, and checkpoint shape mismatches to distinct process
//! exit codes, so keep those variants stable.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An item appears in the interaction log but not in the attribution
    /// file. Every retained item must have exactly one producer.
    #[error("item {item:?} has no producer attribution")]
    MissingProducer { item: String },

    /// A line in an input file does not have the expected shape.
    #[error("{path}:{line}: malformed record: {reason}")]
    MalformedRecord {
        path: String,
        line: usize,
        reason: String,
    },

    /// A split or checkpoint refers to a token absent from the corpus.
    #[error("unknown {kind} token {token:?}")]
    UnknownToken { kind: &'static str, token: String },

    /// The activity filter removed every user or every item.
    #[error("no {what} survive the activity filter (min_actions = {min_actions})")]
    EmptyAfterFilter { what: &'static str, min_actions: usize },

    /// Negative sampling could not find a non-consumed item for a user
    /// within the rejection budget. Happens when a user consumed nearly
    /// the whole catalogue.
    #[error("negative sampling starved for user {user}: {attempts} rejections")]
    SamplerStarved { user: usize, attempts: usize },

    /// The training loss became NaN or infinite.
    #[error("training loss is not finite at epoch {epoch} (loss = {loss})")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    /// A checkpoint does not match the corpus or the requested model shape.
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    /// No user had a scoreable target during evaluation.
    #[error("no evaluable users: {context}")]
    NothingToEvaluate { context: String },

    /// A user has an empty candidate set during evaluation.
    #[error("user {user} has no negative candidates to rank against")]
    EmptyCandidateSet { user: usize },

    /// A key=value config file failed to parse.
    #[error("{path}:{line}: bad config entry: {reason}")]
    ConfigParse {
        path: String,
        line: usize,
        reason: String,
    },

    /// Invalid command-line or config combination detected past clap.
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    /// A checkpoint file is structurally unreadable.
    #[error("bad checkpoint {path}: {reason}")]
    BadCheckpoint { path: String, reason: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI. Zero is success, one is the generic
    /// failure; the reserved codes let shell pipelines distinguish the
    /// interesting failure classes.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingProducer { .. }
            | Error::MalformedRecord { .. }
            | Error::UnknownToken { .. } => 2,
            Error::EmptyAfterFilter { .. } => 3,
            Error::NonFiniteLoss { .. } => 4,
            Error::DimensionMismatch { .. } => 5,
            _ => 1,
        }
    }
}
