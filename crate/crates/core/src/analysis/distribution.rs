use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::AnalyzedPair;
use crate::error::{Error, Result};
use crate::levenshtein::OpKind;

/// Fractions over labeled buckets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub buckets: Vec<String>,
    pub fractions: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci: Option<Vec<(f64, f64)>>,
    pub sample_size: usize,
}

impl DistributionReport {
    /// Normalizes integer counts; buckets with zero count are kept.
    pub fn from_counts<I, K>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, usize)>,
        K: ToString,
    {
        let (buckets, counts): (Vec<String>, Vec<usize>) = counts.into_iter().map(|(k, c)| (k.to_string(), c)).unzip();
        let total: usize = counts.iter().sum();
        if total == 0 {
            return Err(Error::domain("distribution over zero observations"));
        }
        Ok(DistributionReport {
            buckets,
            fractions: counts.iter().map(|&c| c as f64 / total as f64).collect(),
            ci: None,
            sample_size: total,
        })
    }

    pub fn fraction(&self, bucket: &str) -> Option<f64> {
        self.buckets.iter().position(|b| b == bucket).map(|i| self.fractions[i])
    }

    /// Running sums of the fractions, in bucket order.
    pub fn cumulative(&self) -> Vec<f64> {
        self.fractions
            .iter()
            .scan(0.0, |acc, f| {
                *acc += f;
                Some(*acc)
            })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.fractions.iter().sum()
    }
}

/// Fraction of observations per distance value, ascending.
pub fn histogram(distances: &[usize]) -> Result<DistributionReport> {
    if distances.is_empty() {
        return Err(Error::domain("histogram of an empty pair set"));
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &d in distances {
        *counts.entry(d).or_default() += 1;
    }
    DistributionReport::from_counts(counts)
}

/// Token edit distance distribution over `pairs`.
pub fn edit_distance_histogram(pairs: &[AnalyzedPair]) -> Result<DistributionReport> {
    histogram(&pairs.iter().map(AnalyzedPair::distance).collect::<Vec<_>>())
}

/// Chunk edit distance distribution over `pairs`.
pub fn chunk_distance_histogram(pairs: &[AnalyzedPair]) -> Result<DistributionReport> {
    histogram(&pairs.iter().map(|p| p.chunk_distance).collect::<Vec<_>>())
}

/// Edit-operation mix, averaged two ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpDistribution {
    /// Per-pair operation proportions averaged over pairs.
    pub macro_average: DistributionReport,
    /// Operations pooled across all pairs.
    pub micro_average: DistributionReport,
}

const EDIT_KINDS: [OpKind; 3] = [OpKind::Substitute, OpKind::Delete, OpKind::Insert];

/// Operation mix of the canonical scripts, optionally restricted to pairs
/// at one distance. Pairs without edits carry no proportions and are
/// skipped.
pub fn edit_op_distribution(pairs: &[AnalyzedPair], only_distance: Option<usize>) -> Result<OpDistribution> {
    let counts: Vec<[usize; 3]> = pairs
        .iter()
        .filter(|p| only_distance.is_none_or(|d| p.distance() == d))
        .filter(|p| p.distance() > 0)
        .map(|p| EDIT_KINDS.map(|k| p.alignment.script.count(k)))
        .collect();
    op_distribution_from_counts(&counts)
}

/// Same as [`edit_op_distribution`] from per-pair `[substitute, delete,
/// insert]` counts.
pub fn op_distribution_from_counts(counts: &[[usize; 3]]) -> Result<OpDistribution> {
    let counts: Vec<&[usize; 3]> = counts.iter().filter(|c| c.iter().sum::<usize>() > 0).collect();
    if counts.is_empty() {
        return Err(Error::domain("operation distribution of an empty pair set"));
    }
    let n = counts.len() as f64;
    let mut macro_fracs = [0.0f64; 3];
    let mut pooled = [0usize; 3];
    for c in &counts {
        let total = c.iter().sum::<usize>() as f64;
        for k in 0..3 {
            macro_fracs[k] += c[k] as f64 / total;
            pooled[k] += c[k];
        }
    }
    let buckets: Vec<String> = EDIT_KINDS.iter().map(|k| k.as_str().to_string()).collect();
    let macro_average = DistributionReport {
        buckets: buckets.clone(),
        fractions: macro_fracs.iter().map(|f| f / n).collect(),
        ci: None,
        sample_size: counts.len(),
    };
    let micro_average = DistributionReport::from_counts(buckets.into_iter().zip(pooled))?;
    Ok(OpDistribution {
        macro_average,
        micro_average,
    })
}
