//! Percentile bootstrap and the distance-vs-rating tradeoff curve.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::AnalyzedPair;
use crate::error::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 1_000;
pub const DEFAULT_SEED: u64 = 0x5EED_2019;

/// Linear-interpolation quantile (R type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// 95% percentile-bootstrap interval for the mean of `values`.
pub fn bootstrap_mean_ci(values: &[f64], resamples: usize, rng: &mut ChaCha8Rng) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::domain("bootstrap of an empty sample"));
    }
    if resamples == 0 {
        return Err(Error::domain("bootstrap needs at least one resample"));
    }
    let n = values.len();
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    Ok((quantile_sorted(&means, 0.025), quantile_sorted(&means, 0.975)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub distance: usize,
    pub n: usize,
    pub mean_rating: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Per-bucket generator: independent of which other buckets exist.
fn bucket_rng(seed: u64, distance: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (distance as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Mean seriousness rating per token edit distance with bootstrap
/// intervals. Only pairs with at least two ratings take part; distances
/// with no such pair are omitted.
pub fn distance_vs_rating_curve(pairs: &[AnalyzedPair], resamples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    let observations: Vec<(usize, f64)> = pairs
        .iter()
        .filter(|p| p.ratings.len() >= 2)
        .filter_map(|p| Some((p.distance(), p.mean_rating()?)))
        .collect();
    curve_from_observations(&observations, resamples, seed)
}

/// [`distance_vs_rating_curve`] over precomputed `(distance, mean rating)`
/// observations.
pub fn curve_from_observations(observations: &[(usize, f64)], resamples: usize, seed: u64) -> Result<Vec<CurvePoint>> {
    let mut buckets: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &(d, r) in observations {
        buckets.entry(d).or_default().push(r);
    }
    buckets
        .into_iter()
        .map(|(distance, values)| {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let (ci_low, ci_high) = bootstrap_mean_ci(&values, resamples, &mut bucket_rng(seed, distance))?;
            Ok(CurvePoint {
                distance,
                n: values.len(),
                mean_rating: mean,
                ci_low,
                ci_high,
            })
        })
        .collect()
}
