//! Reward mathematics, rating aggregation and task sampling.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A rater's belief in `[0, 1]` that a headline comes from a serious outlet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriousnessRating {
    pub value: f64,
    pub rater_id: String,
    pub target_id: String,
}

impl SeriousnessRating {
    pub fn new(value: f64, rater_id: impl Into<String>, target_id: impl Into<String>) -> Result<Self> {
        check_unit("rating", value)?;
        Ok(SeriousnessRating {
            value,
            rater_id: rater_id.into(),
            target_id: target_id.into(),
        })
    }
}

/// Parameters governing both rewards and the task mix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    /// Probability of issuing an "unfun" task.
    pub alpha: f64,
    /// Beliefs are clamped to `[epsilon, 1 - epsilon]` before scoring.
    pub epsilon: f64,
    pub unfun_scale: f64,
    pub rating_scale: f64,
    /// Sampling weight per chunk pattern for unfun tasks; unlisted
    /// patterns weigh 1.
    pub pattern_priority: BTreeMap<String, f64>,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            alpha: 1.0 / 3.0,
            epsilon: 0.01,
            unfun_scale: 1000.0,
            rating_scale: 200.0,
            pattern_priority: BTreeMap::new(),
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("reward config", format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::invalid(
                "reward config",
                format!("epsilon must lie in (0, 0.5), got {}", self.epsilon),
            ));
        }
        if !(self.unfun_scale > 0.0 && self.rating_scale > 0.0) {
            return Err(Error::invalid("reward config", "reward scales must be positive"));
        }
        if let Some((pattern, w)) = self.pattern_priority.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::invalid(
                "reward config",
                format!("pattern weight for `{pattern}` must be positive, got {w}"),
            ));
        }
        Ok(())
    }
}

fn check_unit(what: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must lie in [0, 1], got {value}")))
    }
}

/// Ground truth of an unmodified headline, or a binarized rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Serious,
    Satirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConsensusClass {
    ConsensusSerious,
    NoConsensus,
    ConsensusSatirical,
}

impl ConsensusClass {
    pub const ALL: [ConsensusClass; 3] = [
        ConsensusClass::ConsensusSerious,
        ConsensusClass::NoConsensus,
        ConsensusClass::ConsensusSatirical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConsensusClass::ConsensusSerious => "CONSENSUS_SERIOUS",
            ConsensusClass::NoConsensus => "NO_CONSENSUS",
            ConsensusClass::ConsensusSatirical => "CONSENSUS_SATIRICAL",
        }
    }
}

/// Average seriousness rating `r(h')`.
pub fn mean_rating(ratings: &[f64]) -> Result<f64> {
    if ratings.is_empty() {
        return Err(Error::domain("mean of zero ratings"));
    }
    for &r in ratings {
        check_unit("rating", r)?;
    }
    Ok(ratings.iter().sum::<f64>() / ratings.len() as f64)
}

/// Reward for an unfunned headline: the scaled geometric mean of its mean
/// rating `r` and its similarity `s` to the original.
pub fn reward_unfun(r: f64, s: f64, cfg: &RewardConfig) -> Result<f64> {
    check_unit("mean rating", r)?;
    check_unit("similarity", s)?;
    Ok(cfg.unfun_scale * (r * s).sqrt())
}

/// Logarithmic score for a belief `p` that the ground-truth headline is
/// serious, clamped to `[epsilon, 1 - epsilon]` and mapped affinely onto
/// `[0, rating_scale]`. The affine map keeps the rule proper.
pub fn reward_rating(p: f64, truth: Verdict, cfg: &RewardConfig) -> f64 {
    let eps = cfg.epsilon;
    let q = match truth {
        Verdict::Serious => p,
        Verdict::Satirical => 1.0 - p,
    };
    let q = if q.is_nan() { eps } else { q.clamp(eps, 1.0 - eps) };
    let floor = eps.ln();
    cfg.rating_scale * (q.ln() - floor) / ((1.0 - eps).ln() - floor)
}

/// Serious strictly above one half; exactly one half counts as satirical.
pub fn binarize(value: f64) -> Verdict {
    if value > 0.5 {
        Verdict::Serious
    } else {
        Verdict::Satirical
    }
}

/// Majority of binarized ratings; needs at least two ratings.
pub fn aggregate_consensus(ratings: &[f64]) -> Result<ConsensusClass> {
    if ratings.len() < 2 {
        return Err(Error::InsufficientRatings {
            needed: 2,
            got: ratings.len(),
        });
    }
    let serious = ratings.iter().filter(|&&r| binarize(r) == Verdict::Serious).count();
    Ok(match (2 * serious).cmp(&ratings.len()) {
        std::cmp::Ordering::Greater => ConsensusClass::ConsensusSerious,
        std::cmp::Ordering::Equal => ConsensusClass::NoConsensus,
        std::cmp::Ordering::Less => ConsensusClass::ConsensusSatirical,
    })
}

/// Convenience over [`aggregate_consensus`] for rating records.
pub fn aggregate_records(ratings: &[SeriousnessRating]) -> Result<ConsensusClass> {
    let values: Vec<f64> = ratings.iter().map(|r| r.value).collect();
    aggregate_consensus(&values)
}

/// A headline as shown to a player.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadlineRef {
    pub id: String,
    pub text: String,
}

/// A satirical headline eligible for the unfun task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatiricalCandidate {
    pub headline: HeadlineRef,
    pub pattern: Option<String>,
}

/// A modified headline awaiting ratings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModifiedCandidate {
    pub headline: HeadlineRef,
    /// The satirical original; never shown as the ground truth next to
    /// its own modification.
    #[serde(default)]
    pub parent_id: Option<String>,
    pub authors: BTreeSet<String>,
    pub raters: BTreeSet<String>,
}

impl ModifiedCandidate {
    pub fn rating_count(&self) -> usize {
        self.raters.len()
    }

    fn ratable_by(&self, player: &str) -> bool {
        !self.authors.contains(player) && !self.raters.contains(player)
    }
}

/// Snapshot of everything the sampler may hand out.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskPool {
    pub satirical: Vec<SatiricalCandidate>,
    pub modified: Vec<ModifiedCandidate>,
    /// Unmodified headlines with known ground truth.
    pub serious_truth: Vec<HeadlineRef>,
    pub satirical_truth: Vec<HeadlineRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TaskKind {
    Task1,
    Task2,
}

/// A task issued to a player. For rating tasks the server keeps
/// `modified_index` and `truth` to itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TaskAssignment {
    Unfun {
        headline: HeadlineRef,
    },
    Rate {
        items: [HeadlineRef; 2],
        modified_index: usize,
        truth: Verdict,
    },
}

impl TaskAssignment {
    pub fn kind(&self) -> TaskKind {
        match self {
            TaskAssignment::Unfun { .. } => TaskKind::Task1,
            TaskAssignment::Rate { .. } => TaskKind::Task2,
        }
    }

    pub fn modified(&self) -> Option<&HeadlineRef> {
        match self {
            TaskAssignment::Rate { items, modified_index, .. } => Some(&items[*modified_index]),
            TaskAssignment::Unfun { .. } => None,
        }
    }

    pub fn ground_truth(&self) -> Option<(&HeadlineRef, Verdict)> {
        match self {
            TaskAssignment::Rate {
                items,
                modified_index,
                truth,
            } => Some((&items[1 - modified_index], *truth)),
            TaskAssignment::Unfun { .. } => None,
        }
    }
}

/// Draws the next task for `requester`.
///
/// With probability `alpha` (or whenever no rating task can be formed) the
/// player gets an unfun task, drawn with the configured pattern weights.
/// Otherwise the modified headline with the fewest ratings among those the
/// player neither wrote nor rated is paired with a ground-truth headline,
/// serious or satirical with equal odds, in random order.
pub fn sample_task<R: Rng + ?Sized>(
    pool: &TaskPool,
    requester: &str,
    rng: &mut R,
    cfg: &RewardConfig,
) -> Result<TaskAssignment> {
    if pool.satirical.is_empty() {
        return Err(Error::NoTask("the satirical corpus is empty".into()));
    }
    if !rng.random_bool(cfg.alpha) {
        if let Some(task) = rating_task(pool, requester, rng) {
            return Ok(task);
        }
    }
    Ok(unfun_task(pool, rng, cfg))
}

fn unfun_task<R: Rng + ?Sized>(pool: &TaskPool, rng: &mut R, cfg: &RewardConfig) -> TaskAssignment {
    let weight = |c: &SatiricalCandidate| {
        c.pattern
            .as_ref()
            .and_then(|p| cfg.pattern_priority.get(p))
            .copied()
            .unwrap_or(1.0)
    };
    let idx = if cfg.pattern_priority.is_empty() {
        rng.random_range(0..pool.satirical.len())
    } else {
        let total: f64 = pool.satirical.iter().map(weight).sum();
        let mut target = rng.random::<f64>() * total;
        pool.satirical
            .iter()
            .position(|c| {
                target -= weight(c);
                target < 0.0
            })
            .unwrap_or(pool.satirical.len() - 1)
    };
    TaskAssignment::Unfun {
        headline: pool.satirical[idx].headline.clone(),
    }
}

fn rating_task<R: Rng + ?Sized>(pool: &TaskPool, requester: &str, rng: &mut R) -> Option<TaskAssignment> {
    if pool.serious_truth.is_empty() && pool.satirical_truth.is_empty() {
        return None;
    }
    let eligible: Vec<&ModifiedCandidate> = pool.modified.iter().filter(|m| m.ratable_by(requester)).collect();
    let fewest = eligible.iter().map(|m| m.rating_count()).min()?;
    let least_rated: Vec<&ModifiedCandidate> = eligible.into_iter().filter(|m| m.rating_count() == fewest).collect();
    let chosen = least_rated[rng.random_range(0..least_rated.len())];
    let modified = chosen.headline.clone();
    let parent = chosen.parent_id.as_deref();
    let eligible_truth = |truth: Verdict| -> Vec<&HeadlineRef> {
        truth_pool(pool, truth)
            .iter()
            .filter(|g| Some(g.id.as_str()) != parent)
            .collect()
    };
    let first = if rng.random_bool(0.5) {
        Verdict::Serious
    } else {
        Verdict::Satirical
    };
    let second = match first {
        Verdict::Serious => Verdict::Satirical,
        Verdict::Satirical => Verdict::Serious,
    };
    let (truth, candidates) = [first, second]
        .into_iter()
        .map(|t| (t, eligible_truth(t)))
        .find(|(_, c)| !c.is_empty())?;
    let ground = candidates[rng.random_range(0..candidates.len())].clone();

    let modified_index = usize::from(rng.random_bool(0.5));
    let items = if modified_index == 0 {
        [modified, ground]
    } else {
        [ground, modified]
    };
    Some(TaskAssignment::Rate {
        items,
        modified_index,
        truth,
    })
}

fn truth_pool(pool: &TaskPool, truth: Verdict) -> &[HeadlineRef] {
    match truth {
        Verdict::Serious => &pool.serious_truth,
        Verdict::Satirical => &pool.satirical_truth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> RewardConfig {
        RewardConfig::default()
    }

    fn href(id: &str) -> HeadlineRef {
        HeadlineRef {
            id: id.into(),
            text: format!("text of {id}"),
        }
    }

    fn modified(id: &str, author: &str, raters: &[&str]) -> ModifiedCandidate {
        ModifiedCandidate {
            headline: href(id),
            parent_id: None,
            authors: [author.to_string()].into(),
            raters: raters.iter().map(|r| r.to_string()).collect(),
        }
    }

    fn pool() -> TaskPool {
        TaskPool {
            satirical: vec![SatiricalCandidate {
                headline: href("s1"),
                pattern: Some("NP VP PP NP".into()),
            }],
            modified: vec![],
            serious_truth: vec![href("g1")],
            satirical_truth: vec![href("g2")],
        }
    }

    #[test]
    fn mean_rating_examples() {
        assert_eq!(mean_rating(&[1.0]).unwrap(), 1.0);
        assert_eq!(mean_rating(&[0.2, 0.8]).unwrap(), 0.5);
        assert!((mean_rating(&[0.9, 0.7, 0.5]).unwrap() - 0.7).abs() < 1e-12);
        assert!(mean_rating(&[]).is_err());
        assert!(mean_rating(&[1.2]).is_err());
    }

    #[test]
    fn unfun_reward_examples() {
        let c = cfg();
        assert_eq!(reward_unfun(1.0, 1.0, &c).unwrap(), 1000.0);
        assert_eq!(reward_unfun(0.0, 0.4, &c).unwrap(), 0.0);
        assert_eq!(reward_unfun(0.4, 0.0, &c).unwrap(), 0.0);
        let r = reward_unfun(0.75, 2.0 / 3.0, &c).unwrap();
        assert!((r - 707.106_781_186_547_5).abs() < 1e-9);
        assert!(reward_unfun(1.1, 0.5, &c).is_err());
        assert!(reward_unfun(0.5, -0.1, &c).is_err());
        assert!(reward_unfun(f64::NAN, 0.5, &c).is_err());
    }

    #[test]
    fn rating_reward_examples() {
        let c = cfg();
        assert!((reward_rating(0.99, Verdict::Serious, &c) - 200.0).abs() < 1e-9);
        assert!(reward_rating(0.01, Verdict::Serious, &c).abs() < 1e-9);
        // 200 * (ln 0.5 - ln 0.01) / (ln 0.99 - ln 0.01)
        let half = 200.0 * (0.5f64.ln() - 0.01f64.ln()) / (0.99f64.ln() - 0.01f64.ln());
        assert!((half - 170.3).abs() < 0.05);
        assert!((reward_rating(0.5, Verdict::Serious, &c) - half).abs() < 1e-9);
        assert!((reward_rating(0.5, Verdict::Satirical, &c) - half).abs() < 1e-9);
        assert!((reward_rating(0.0, Verdict::Satirical, &c) - 200.0).abs() < 1e-9);
        assert_eq!(reward_rating(1.0, Verdict::Satirical, &c), 0.0);
        assert_eq!(reward_rating(f64::NAN, Verdict::Serious, &c), 0.0);
    }

    #[test]
    fn binarize_examples() {
        assert_eq!(binarize(0.9), Verdict::Serious);
        assert_eq!(binarize(0.1), Verdict::Satirical);
        assert_eq!(binarize(0.5), Verdict::Satirical);
    }

    #[test]
    fn consensus_examples() {
        assert_eq!(aggregate_consensus(&[0.9, 0.8]).unwrap(), ConsensusClass::ConsensusSerious);
        assert_eq!(aggregate_consensus(&[0.9, 0.2]).unwrap(), ConsensusClass::NoConsensus);
        assert_eq!(aggregate_consensus(&[0.1, 0.2, 0.3]).unwrap(), ConsensusClass::ConsensusSatirical);
        assert!(matches!(
            aggregate_consensus(&[0.9]),
            Err(Error::InsufficientRatings { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(cfg().validate().is_ok());
        assert!(RewardConfig { alpha: 1.0, ..cfg() }.validate().is_err());
        assert!(RewardConfig { alpha: 0.0, ..cfg() }.validate().is_err());
        assert!(RewardConfig { epsilon: 0.5, ..cfg() }.validate().is_err());
        let mut bad = cfg();
        bad.pattern_priority.insert("NP".into(), -1.0);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_corpus_yields_no_task() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let err = sample_task(&TaskPool::default(), "p", &mut rng, &cfg()).unwrap_err();
        assert!(matches!(err, Error::NoTask(_)));
    }

    #[test]
    fn fewest_ratings_first() {
        let mut p = pool();
        p.modified = vec![modified("m2", "a", &["x", "y"]), modified("m0", "a", &[])];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut rated = 0;
        for _ in 0..200 {
            let task = sample_task(&p, "z", &mut rng, &cfg()).unwrap();
            if let Some(m) = task.modified() {
                assert_eq!(m.id, "m0");
                rated += 1;
            }
        }
        assert!(rated > 0);
    }

    #[test]
    fn own_submission_is_never_rated() {
        let mut p = pool();
        p.modified = vec![modified("m", "me", &[])];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let task = sample_task(&p, "me", &mut rng, &cfg()).unwrap();
            assert_eq!(task.kind(), TaskKind::Task1);
        }
    }

    #[test]
    fn rating_task_shape() {
        let mut p = pool();
        p.modified = vec![modified("m", "a", &[])];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut orders = BTreeSet::new();
        let mut truths = BTreeSet::new();
        for _ in 0..300 {
            if let TaskAssignment::Rate { items, modified_index, truth } = sample_task(&p, "b", &mut rng, &cfg()).unwrap() {
                assert_eq!(items[modified_index].id, "m");
                let g = &items[1 - modified_index];
                match truth {
                    Verdict::Serious => assert_eq!(g.id, "g1"),
                    Verdict::Satirical => assert_eq!(g.id, "g2"),
                }
                orders.insert(modified_index);
                truths.insert(truth);
            }
        }
        assert_eq!(orders.len(), 2);
        assert_eq!(truths.len(), 2);
    }

    #[test]
    fn original_is_never_its_own_ground_truth() {
        let mut p = pool();
        let mut m = modified("m", "a", &[]);
        m.parent_id = Some("g2".into());
        p.modified = vec![m];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut rating_tasks = 0;
        for _ in 0..300 {
            let task = sample_task(&p, "b", &mut rng, &cfg()).unwrap();
            if let Some((g, truth)) = task.ground_truth() {
                assert_eq!((g.id.as_str(), truth), ("g1", Verdict::Serious));
                rating_tasks += 1;
            }
        }
        assert!(rating_tasks > 100);

        p.serious_truth.clear();
        for _ in 0..50 {
            assert_eq!(sample_task(&p, "b", &mut rng, &cfg()).unwrap().kind(), TaskKind::Task1);
        }
    }

    #[test]
    fn pattern_priority_boosts_sampling() {
        let mut p = pool();
        p.satirical.push(SatiricalCandidate {
            headline: href("s2"),
            pattern: Some("NP VP NP PP NP".into()),
        });
        let mut c = cfg();
        c.pattern_priority.insert("NP VP NP PP NP".into(), 9.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut boosted = 0;
        let mut total = 0;
        for _ in 0..3000 {
            if let TaskAssignment::Unfun { headline } = sample_task(&p, "x", &mut rng, &c).unwrap() {
                total += 1;
                boosted += usize::from(headline.id == "s2");
            }
        }
        let share = boosted as f64 / total as f64;
        assert!((share - 0.9).abs() < 0.03, "boosted share {share}");
    }

    proptest! {
        #[test]
        fn unfun_reward_monotone(r1 in 0.0..=1.0f64, r2 in 0.0..=1.0f64, s in 0.0..=1.0f64) {
            let c = cfg();
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let a = reward_unfun(lo, s, &c).unwrap();
            let b = reward_unfun(hi, s, &c).unwrap();
            prop_assert!(a <= b);
            prop_assert!((0.0..=1000.0).contains(&b));
            prop_assert_eq!(reward_unfun(s, lo, &c).unwrap(), a);
            prop_assert_eq!(a == 0.0, lo * s == 0.0);
        }

        #[test]
        fn rating_reward_in_range(p in 0.0..=1.0f64) {
            let c = cfg();
            for truth in [Verdict::Serious, Verdict::Satirical] {
                let r = reward_rating(p, truth, &c);
                prop_assert!((-1e-9..=200.0 + 1e-9).contains(&r));
            }
        }

        #[test]
        fn consensus_ignores_order(mut ratings in prop::collection::vec(0.0..=1.0f64, 2..8), seed in any::<u64>()) {
            let before = aggregate_consensus(&ratings).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..ratings.len()).rev() {
                let j = rng.random_range(0..=i);
                ratings.swap(i, j);
            }
            prop_assert_eq!(before, aggregate_consensus(&ratings).unwrap());
        }
    }

    #[test]
    fn rating_reward_is_proper_on_grid() {
        let c = cfg();
        for k in 1..=9 {
            let q = k as f64 / 10.0;
            let (best, _) = (0..=100)
                .map(|i| {
                    let p = i as f64 / 100.0;
                    let expected =
                        q * reward_rating(p, Verdict::Serious, &c) + (1.0 - q) * reward_rating(p, Verdict::Satirical, &c);
                    (p, expected)
                })
                .fold((0.0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
            assert!((best - q).abs() <= 0.01 + 1e-12, "q={q} best={best}");
        }
    }
}
