//! Persistent game state on a single SQLite file: corpora, submissions,
//! ratings, issued tasks and annotations, plus the JSONL import and export
//! formats.

mod formats;
mod schema;
mod store;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use formats::{CorpusLine, EditOpCounts, FieldMap, ImportReport, LineError, PairExportRecord};
pub use store::{PairRecord, RatingOutcome, StoreCounts, SubmissionOutcome, Store};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown headline `{0}`")]
    UnknownHeadline(String),

    #[error("headline `{0}` is not satirical")]
    NotSatirical(String),

    #[error("no open rating task for these items")]
    TaskNotIssued,

    #[error("already rated")]
    Duplicate,

    #[error("invalid {what}: {detail}")]
    Invalid { what: &'static str, detail: String },

    #[error(transparent)]
    Core(#[from] unfun_core::Error),

    #[error(transparent)]
    Sqlite(#[from] rusqlite::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = StoreError> = std::result::Result<T, E>;

fn invalid(what: &'static str, detail: impl Into<String>) -> StoreError {
    StoreError::Invalid {
        what,
        detail: detail.into(),
    }
}

/// First 16 hex digits of the SHA-256 of the parts, unit-separator joined.
pub fn content_id(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            hasher.update([0x1f]);
        }
        hasher.update(part.as_bytes());
    }
    hex::encode(&hasher.finalize()[..8])
}

/// Id of a corpus headline: a hash of its normalized text.
pub fn corpus_headline_id(normalized_text: &str) -> String {
    content_id(&[normalized_text])
}

/// Id of a modified headline, which is also the id of its pair.
pub fn modified_headline_id(parent_id: &str, normalized_text: &str) -> String {
    content_id(&["MODIFIED", parent_id, normalized_text])
}
