//! Shallow parsing of headlines and chunk-level alignment.

mod chunker;
mod tagger;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use chunker::chunk;
pub use tagger::{pos_tag, HeuristicTagger, PosTag, PosTaggedToken, Tagger};

use crate::alignment::{fold, TokenSequence};
use crate::error::{Error, Result};
use crate::levenshtein::{self, AlignedOp, OpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChunkLabel {
    #[serde(rename = "NP")]
    Np,
    #[serde(rename = "VP")]
    Vp,
    #[serde(rename = "PP")]
    Pp,
    #[serde(rename = "ADJP")]
    Adjp,
    #[serde(rename = "ADVP")]
    Advp,
    #[serde(rename = "O")]
    O,
}

impl ChunkLabel {
    pub const ALL: [ChunkLabel; 6] = [
        ChunkLabel::Np,
        ChunkLabel::Vp,
        ChunkLabel::Pp,
        ChunkLabel::Adjp,
        ChunkLabel::Advp,
        ChunkLabel::O,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChunkLabel::Np => "NP",
            ChunkLabel::Vp => "VP",
            ChunkLabel::Pp => "PP",
            ChunkLabel::Adjp => "ADJP",
            ChunkLabel::Advp => "ADVP",
            ChunkLabel::O => "O",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ChunkLabel::Np => "Noun phrase",
            ChunkLabel::Vp => "Verb phrase",
            ChunkLabel::Pp => "Preposition",
            ChunkLabel::Adjp => "Adjective phrase",
            ChunkLabel::Advp => "Adverb phrase",
            ChunkLabel::O => "Outside any phrase",
        }
    }
}

impl fmt::Display for ChunkLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChunkLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChunkLabel::ALL
            .into_iter()
            .find(|label| label.as_str() == s)
            .ok_or_else(|| Error::invalid("chunk label", s))
    }
}

/// A labeled, non-empty, contiguous token span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub label: ChunkLabel,
    pub tokens: Vec<String>,
}

impl Chunk {
    pub fn new(label: ChunkLabel, tokens: Vec<String>) -> Self {
        debug_assert!(!tokens.is_empty());
        Chunk { label, tokens }
    }

    /// Label plus case-folded content; the key chunk equality is defined on.
    fn key(&self) -> (ChunkLabel, Vec<String>) {
        (self.label, self.tokens.iter().map(|t| fold(t)).collect())
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} {}]", self.label, self.text())
    }
}

/// Chunks in headline order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChunkSequence {
    chunks: Vec<Chunk>,
}

impl ChunkSequence {
    pub fn new(chunks: Vec<Chunk>) -> Self {
        ChunkSequence { chunks }
    }

    /// Builds a sequence from externally supplied annotations, rejecting
    /// empty chunks.
    pub fn from_annotations<I, L, T>(spans: I) -> Result<Self>
    where
        I: IntoIterator<Item = (L, Vec<T>)>,
        L: AsRef<str>,
        T: Into<String>,
    {
        let mut chunks = Vec::new();
        for (n, (label, tokens)) in spans.into_iter().enumerate() {
            let label: ChunkLabel = label.as_ref().parse()?;
            let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
            if tokens.is_empty() || tokens.iter().any(|t| t.trim().is_empty()) {
                return Err(Error::invalid("chunk", format!("chunk {n} has an empty token span")));
            }
            chunks.push(Chunk { label, tokens });
        }
        Ok(ChunkSequence { chunks })
    }

    pub fn chunks(&self) -> &[Chunk] {
        &self.chunks
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    /// Space-joined chunk labels, e.g. `NP VP PP NP`.
    pub fn pattern(&self) -> String {
        chunk_pattern(self)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &String> {
        self.chunks.iter().flat_map(|c| c.tokens.iter())
    }

    /// Whether the chunk tokens, in order, spell out exactly `seq`.
    pub fn partitions(&self, seq: &TokenSequence) -> bool {
        self.chunks.iter().all(|c| !c.tokens.is_empty()) && self.tokens().eq(seq.tokens().iter())
    }

    /// Whether the chunks cover the same characters as `text`, ignoring
    /// whitespace and case. Used to vet gold annotations whose tokenization
    /// may differ from ours.
    pub fn covers_text(&self, text: &str) -> bool {
        let ours: String = self.tokens().flat_map(|t| t.chars()).filter(|c| !c.is_whitespace()).collect();
        let theirs: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        ours.to_lowercase() == theirs.to_lowercase()
    }

    /// Replaces the chunk at 1-based `position`.
    pub fn with_replaced(&self, position: usize, chunk: Chunk) -> Option<ChunkSequence> {
        let idx = position.checked_sub(1)?;
        let mut chunks = self.chunks.clone();
        *chunks.get_mut(idx)? = chunk;
        Some(ChunkSequence { chunks })
    }
}

impl fmt::Display for ChunkSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.chunks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Tags and chunks a token sequence with the built-in heuristics.
pub fn shallow_parse(tokens: &TokenSequence) -> ChunkSequence {
    chunk(&pos_tag(tokens))
}

pub fn chunk_pattern(cs: &ChunkSequence) -> String {
    cs.chunks
        .iter()
        .map(|c| c.label.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Fraction of the corpus carrying each chunk pattern.
pub fn pattern_frequencies(corpus: &[ChunkSequence]) -> Result<BTreeMap<String, f64>> {
    if corpus.is_empty() {
        return Err(Error::domain("pattern frequencies of an empty corpus"));
    }
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for cs in corpus {
        *counts.entry(cs.pattern()).or_default() += 1;
    }
    let n = corpus.len() as f64;
    Ok(counts.into_iter().map(|(p, c)| (p, c as f64 / n)).collect())
}

/// The `k` most frequent patterns, most frequent first; ties by pattern text.
pub fn top_patterns(frequencies: &BTreeMap<String, f64>, k: usize) -> Vec<(String, f64)> {
    let mut ranked: Vec<(String, f64)> = frequencies.iter().map(|(p, f)| (p.clone(), *f)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

fn keys(cs: &ChunkSequence) -> Vec<(ChunkLabel, Vec<String>)> {
    cs.chunks.iter().map(Chunk::key).collect()
}

/// Levenshtein distance over chunks; chunks are equal when label and
/// case-folded tokens agree.
pub fn chunk_edit_distance(a: &ChunkSequence, b: &ChunkSequence) -> usize {
    levenshtein::distance_by(&keys(a), &keys(b), |x, y| x == y)
}

/// Canonical chunk-level alignment, same tie-breaking as the token level.
pub fn chunk_edit_script(a: &ChunkSequence, b: &ChunkSequence) -> (usize, Vec<AlignedOp>) {
    levenshtein::script_by(&keys(a), &keys(b), |x, y| x == y)
}

/// A pair whose only chunk-level edit is one substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingleSubstitution {
    /// 1-based index of the replaced chunk in the original sequence.
    pub position: usize,
    pub chunk_before: Chunk,
    pub chunk_after: Chunk,
}

pub fn classify_single_substitution(a: &ChunkSequence, b: &ChunkSequence) -> Option<SingleSubstitution> {
    let (distance, ops) = chunk_edit_script(a, b);
    if distance != 1 {
        return None;
    }
    let edit = ops.into_iter().find(|op| op.kind.is_edit())?;
    (edit.kind == OpKind::Substitute).then(|| SingleSubstitution {
        position: edit.position_a + 1,
        chunk_before: a.chunks[edit.position_a].clone(),
        chunk_after: b.chunks[edit.position_b].clone(),
    })
}
