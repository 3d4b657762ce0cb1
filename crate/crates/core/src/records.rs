//! Records shared between the store, the service and the analyses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chunking::ChunkSequence;
use crate::error::Error;
use crate::game::Verdict;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Origin {
    Serious,
    Satirical,
    Modified,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::Serious, Origin::Satirical, Origin::Modified];

    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Serious => "SERIOUS",
            Origin::Satirical => "SATIRICAL",
            Origin::Modified => "MODIFIED",
        }
    }

    /// Ground truth of an unmodified headline.
    pub fn verdict(self) -> Option<Verdict> {
        match self {
            Origin::Serious => Some(Verdict::Serious),
            Origin::Satirical => Some(Verdict::Satirical),
            Origin::Modified => None,
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Origin::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid("origin", s))
    }
}

/// Collapses runs of whitespace and trims; casing is kept.
pub fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub id: String,
    pub text: String,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_chunks: Option<ChunkSequence>,
}

/// A player's unfunned version of a satirical headline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub id: String,
    pub player_id: String,
    pub original_id: String,
    pub modified_text: String,
    /// UTC, whole seconds since the Unix epoch.
    pub created_at: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingRecord {
    pub id: String,
    pub player_id: String,
    pub target_id: String,
    pub value: f64,
    pub created_at: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlayerProfile {
    pub player_id: String,
    pub cumulative_unfun_reward: f64,
    pub cumulative_rating_reward: f64,
    pub unfun_count: u64,
    pub rating_count: u64,
}

impl PlayerProfile {
    pub fn total_reward(&self) -> f64 {
        self.cumulative_unfun_reward + self.cumulative_rating_reward
    }
}
