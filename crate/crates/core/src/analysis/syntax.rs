//! Which chunks get modified, and where.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AnalyzedPair, DistributionReport};
use crate::chunking::{ChunkLabel, ChunkSequence, SingleSubstitution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftRow {
    pub label: ChunkLabel,
    pub modified_count: usize,
    pub modified_fraction: f64,
    pub prior_count: usize,
    pub prior_fraction: f64,
    /// `None` when the type never occurs in the prior but was modified.
    pub lift: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftTable {
    pub rows: Vec<LiftRow>,
    pub modified_total: usize,
    pub prior_total: usize,
}

impl LiftTable {
    pub fn row(&self, label: ChunkLabel) -> Option<&LiftRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Distribution of modified chunk types against their prior frequency
/// among all chunks of the original headlines.
///
/// Rows cover every type that occurs in either distribution, most often
/// modified first.
pub fn chunk_type_lift(single_subs: &[SingleSubstitution], prior_corpus: &[ChunkSequence]) -> Result<LiftTable> {
    if single_subs.is_empty() {
        return Err(Error::domain("lift over zero single-substitution pairs"));
    }
    let mut modified: BTreeMap<ChunkLabel, usize> = BTreeMap::new();
    for sub in single_subs {
        *modified.entry(sub.chunk_before.label).or_default() += 1;
    }
    let mut prior: BTreeMap<ChunkLabel, usize> = BTreeMap::new();
    for cs in prior_corpus {
        for c in cs.chunks() {
            *prior.entry(c.label).or_default() += 1;
        }
    }
    let prior_total: usize = prior.values().sum();
    if prior_total == 0 {
        return Err(Error::domain("lift against an empty prior corpus"));
    }
    let modified_total = single_subs.len();

    let mut rows: Vec<LiftRow> = ChunkLabel::ALL
        .into_iter()
        .filter(|l| modified.contains_key(l) || prior.contains_key(l))
        .map(|label| {
            let modified_count = modified.get(&label).copied().unwrap_or(0);
            let prior_count = prior.get(&label).copied().unwrap_or(0);
            let modified_fraction = modified_count as f64 / modified_total as f64;
            let prior_fraction = prior_count as f64 / prior_total as f64;
            LiftRow {
                label,
                modified_count,
                modified_fraction,
                prior_count,
                prior_fraction,
                lift: (prior_count > 0).then(|| modified_fraction / prior_fraction),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.modified_count
            .cmp(&a.modified_count)
            .then(b.prior_count.cmp(&a.prior_count))
            .then(a.label.cmp(&b.label))
    });
    Ok(LiftTable {
        rows,
        modified_total,
        prior_total,
    })
}

/// Original-headline length class for position statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LengthGroup {
    Chunks(usize),
    Other,
}

impl fmt::Display for LengthGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthGroup::Chunks(n) => write!(f, "{n}"),
            LengthGroup::Other => f.write_str("other"),
        }
    }
}

pub const POSITION_LENGTHS: std::ops::RangeInclusive<usize> = 3..=6;

/// Distribution of the 1-based modified position for each original chunk
/// count in 3..=6; all other lengths are pooled under `Other`.
pub fn modified_position_distribution(pairs: &[AnalyzedPair]) -> Result<BTreeMap<LengthGroup, DistributionReport>> {
    let observations: Vec<(usize, usize)> = pairs
        .iter()
        .filter_map(|p| Some((p.original_chunks.len(), p.single_substitution.as_ref()?.position)))
        .collect();
    position_distribution(&observations)
}

/// [`modified_position_distribution`] over `(chunk count, position)` pairs.
pub fn position_distribution(observations: &[(usize, usize)]) -> Result<BTreeMap<LengthGroup, DistributionReport>> {
    if observations.is_empty() {
        return Err(Error::domain("position distribution of zero pairs"));
    }
    let mut groups: BTreeMap<LengthGroup, BTreeMap<usize, usize>> = BTreeMap::new();
    for &(len, pos) in observations {
        if pos == 0 || pos > len {
            return Err(Error::domain(format!("position {pos} outside a {len}-chunk headline")));
        }
        let group = if POSITION_LENGTHS.contains(&len) {
            LengthGroup::Chunks(len)
        } else {
            LengthGroup::Other
        };
        let counts = groups.entry(group).or_insert_with(|| match group {
            LengthGroup::Chunks(n) => (1..=n).map(|p| (p, 0)).collect(),
            LengthGroup::Other => BTreeMap::new(),
        });
        *counts.entry(pos).or_default() += 1;
    }
    groups
        .into_iter()
        .map(|(g, counts)| Ok((g, DistributionReport::from_counts(counts)?)))
        .collect()
}
