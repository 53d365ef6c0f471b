use chrono::NaiveDate;
use thiserror::Error;

use crate::ingest::Issue;
use crate::time::TimeWindow;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window: start {start} is not before end {end}")]
    InvalidWindow { start: NaiveDate, end: NaiveDate },

    #[error("invalid window plan: {0}")]
    InvalidPlan(String),

    #[error("window {0} does not span an even number of whole months")]
    UnevenSplit(TimeWindow),

    #[error("duplicate sequence number {0}")]
    DuplicateSeq(u64),

    #[error("self-loop at seq {seq}: {node} -> {node}")]
    SelfLoop { seq: u64, node: String },

    #[error("series length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("infeasible synthetic config: {0}")]
    InfeasibleConfig(String),

    #[error("window starting {start} precedes the role data horizon {valid_from}")]
    BeforeRoleHorizon {
        start: NaiveDate,
        valid_from: NaiveDate,
    },

    #[error("{source_name}: {} invalid row(s), first: {}", .issues.len(), .issues.first().map(|i| i.to_string()).unwrap_or_default())]
    Invalid {
        source_name: String,
        issues: Vec<Issue>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    FileIo {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
