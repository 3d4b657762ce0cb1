use serde::{Deserialize, Serialize};

use crate::game::{aggregate_consensus, ConsensusClass};
use crate::records::Origin;

/// Headline counts by aggregate rating class (rows) and origin (columns).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionTable {
    /// `counts[class][origin]`, in `ConsensusClass::ALL` and `Origin::ALL` order.
    pub counts: [[usize; 3]; 3],
}

fn class_index(c: ConsensusClass) -> usize {
    ConsensusClass::ALL.iter().position(|&x| x == c).unwrap_or_default()
}

fn origin_index(o: Origin) -> usize {
    Origin::ALL.iter().position(|&x| x == o).unwrap_or_default()
}

impl ConfusionTable {
    pub fn get(&self, class: ConsensusClass, origin: Origin) -> usize {
        self.counts[class_index(class)][origin_index(origin)]
    }

    pub fn column_total(&self, origin: Origin) -> usize {
        let col = origin_index(origin);
        self.counts.iter().map(|row| row[col]).sum()
    }

    /// Share of the origin's headlines that fall in `class`.
    pub fn column_fraction(&self, class: ConsensusClass, origin: Origin) -> Option<f64> {
        let total = self.column_total(origin);
        (total > 0).then(|| self.get(class, origin) as f64 / total as f64)
    }
}

/// Tallies headlines by consensus class. Headlines with fewer than two
/// ratings are left out.
pub fn confusion_table<'a, I>(rated_headlines: I) -> ConfusionTable
where
    I: IntoIterator<Item = (Origin, &'a [f64])>,
{
    let mut table = ConfusionTable::default();
    for (origin, ratings) in rated_headlines {
        if let Ok(class) = aggregate_consensus(ratings) {
            table.counts[class_index(class)][origin_index(origin)] += 1;
        }
    }
    table
}
