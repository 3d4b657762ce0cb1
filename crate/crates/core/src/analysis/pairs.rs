use serde::{Deserialize, Serialize};

use crate::alignment::{align, tokenize, AlignmentResult, TokenSequence};
use crate::chunking::{chunk_edit_distance, classify_single_substitution, shallow_parse, ChunkSequence, SingleSubstitution};
use crate::game::{aggregate_consensus, mean_rating, ConsensusClass};

/// Raw material for one (original, modified) pair.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PairInput {
    pub pair_id: String,
    pub original: String,
    pub modified: String,
    pub ratings: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_chunks: Option<ChunkSequence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified_chunks: Option<ChunkSequence>,
}

/// A pair with its token and chunk alignments precomputed.
#[derive(Debug, Clone)]
pub struct AnalyzedPair {
    pub pair_id: String,
    pub original: TokenSequence,
    pub modified: TokenSequence,
    pub ratings: Vec<f64>,
    pub alignment: AlignmentResult,
    pub original_chunks: ChunkSequence,
    pub modified_chunks: ChunkSequence,
    pub chunk_distance: usize,
    pub single_substitution: Option<SingleSubstitution>,
}

impl AnalyzedPair {
    /// Aligns both sides. Gold chunks are used where supplied; the built-in
    /// chunker fills in the rest.
    pub fn new(input: PairInput) -> Self {
        let original = tokenize(&input.original);
        let modified = tokenize(&input.modified);
        let alignment = align(&original, &modified);
        let original_chunks = input.original_chunks.unwrap_or_else(|| shallow_parse(&original));
        let modified_chunks = input.modified_chunks.unwrap_or_else(|| shallow_parse(&modified));
        let chunk_distance = chunk_edit_distance(&original_chunks, &modified_chunks);
        let single_substitution = classify_single_substitution(&original_chunks, &modified_chunks);
        AnalyzedPair {
            pair_id: input.pair_id,
            original,
            modified,
            ratings: input.ratings,
            alignment,
            original_chunks,
            modified_chunks,
            chunk_distance,
            single_substitution,
        }
    }

    pub fn distance(&self) -> usize {
        self.alignment.distance
    }

    pub fn mean_rating(&self) -> Option<f64> {
        mean_rating(&self.ratings).ok()
    }

    pub fn consensus(&self) -> Option<ConsensusClass> {
        aggregate_consensus(&self.ratings).ok()
    }

    /// Consensus serious with at least two ratings.
    pub fn is_successful(&self) -> bool {
        self.consensus() == Some(ConsensusClass::ConsensusSerious)
    }
}
