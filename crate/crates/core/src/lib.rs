//! Aligned satirical/serious headline pairs: token alignment, shallow
//! parsing, the game's reward and sampling rules, and the corpus analyses.

mod error;

pub mod alignment;
pub mod analysis;
pub mod chunking;
pub mod game;
pub mod levenshtein;
pub mod records;

pub use alignment::{align, edit_distance, edit_script, similarity, tokenize, AlignmentResult, EditOp, EditScript, TokenSequence};
pub use chunking::{Chunk, ChunkLabel, ChunkSequence};
pub use error::{Error, Result};
pub use game::{RewardConfig, TaskAssignment, TaskPool, Verdict};
pub use levenshtein::OpKind;
pub use records::{Headline, Origin, PlayerProfile, RatingRecord, Submission};
