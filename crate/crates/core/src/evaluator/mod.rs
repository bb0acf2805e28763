//! Retrieval pools, Recall@k over external score matrices, and the relative performance gap.

mod gap;
mod pools;
mod recall;
mod score;

use std::path::PathBuf;

use thiserror::Error;

pub use gap::{gap_reports, relative_gap, summarize, GapReport, SummaryFiles, REPORT_HEADER};
pub use pools::{build_control_pool, CategoryPools, PairTexts, Pool, PoolCaption};
pub use recall::{recall_at_k, recall_at_k_with, Direction};
pub use score::{GroundTruth, ScoreMatrix};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("id {0} is not in the score matrix")]
    UnknownId(String),
    #[error("score matrix has no rows or no columns")]
    EmptyMatrix,
    #[error("ground truth has no queries")]
    NoQueries,
    #[error("k must be at least 1")]
    InvalidK,
    #[error("baseline recall is zero; the relative gap is undefined")]
    ZeroBaseline,
    #[error("recall value {0} is not a finite non-negative number")]
    InvalidRecall(f64),
    #[error("pair {0} has no negative caption")]
    MissingNegative(String),
    #[error("no pairs given")]
    EmptyInput,
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("malformed score matrix: {0}")]
    MalformedMatrix(String),
    #[error("score for ({video_id}, {caption_id}) is not finite")]
    NonFiniteScore { video_id: String, caption_id: String },
    #[error("inconsistent ground truth: {0}")]
    InconsistentGroundTruth(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
