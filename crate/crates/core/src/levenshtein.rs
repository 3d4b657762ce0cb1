//! Unit-cost Levenshtein distance over arbitrary item slices.
//!
//! The token and chunk layers both delegate here; they differ only in the
//! equality predicate they pass in.

use serde::{Deserialize, Serialize};

/// Kind of an alignment step between a source and a target sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpKind {
    Match,
    Substitute,
    Delete,
    Insert,
}

impl OpKind {
    pub fn is_edit(self) -> bool {
        self != OpKind::Match
    }

    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::Match => "MATCH",
            OpKind::Substitute => "SUBSTITUTE",
            OpKind::Delete => "DELETE",
            OpKind::Insert => "INSERT",
        }
    }
}

/// One step of an alignment, positioned in both sequences.
///
/// For `Match` and `Substitute` both positions index existing items. A
/// `Delete` removes `source[position_a]`; `position_b` is the number of
/// target items emitted before it. An `Insert` emits `target[position_b]`;
/// `position_a` is the number of source items consumed before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlignedOp {
    pub kind: OpKind,
    pub position_a: usize,
    pub position_b: usize,
}

/// Minimal edit distance using two rolling rows.
pub fn distance_by<T, F>(a: &[T], b: &[T], eq: F) -> usize
where
    F: Fn(&T, &T) -> bool,
{
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, x) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, y) in b.iter().enumerate() {
            let sub = diag + usize::from(!eq(x, y));
            let best = sub.min(row[j] + 1).min(row[j + 1] + 1);
            diag = row[j + 1];
            row[j + 1] = best;
        }
    }
    row[b.len()]
}

/// Full `(|a|+1) x (|b|+1)` cost table, row-major.
struct Table {
    cols: usize,
    cells: Vec<usize>,
}

impl Table {
    fn build<T, F>(a: &[T], b: &[T], eq: &F) -> Self
    where
        F: Fn(&T, &T) -> bool,
    {
        let cols = b.len() + 1;
        let mut cells = vec![0usize; (a.len() + 1) * cols];
        for j in 0..cols {
            cells[j] = j;
        }
        for i in 1..=a.len() {
            cells[i * cols] = i;
            for j in 1..cols {
                let sub = cells[(i - 1) * cols + j - 1] + usize::from(!eq(&a[i - 1], &b[j - 1]));
                let del = cells[(i - 1) * cols + j] + 1;
                let ins = cells[i * cols + j - 1] + 1;
                cells[i * cols + j] = sub.min(del).min(ins);
            }
        }
        Table { cols, cells }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        self.cells[i * self.cols + j]
    }
}

/// One optimal alignment, traced back from the bottom-right cell.
///
/// Ties are broken at every cell in the order Match, Substitute, Delete,
/// Insert, so the output is a pure function of the inputs. The returned
/// distance is the number of non-`Match` steps.
pub fn script_by<T, F>(a: &[T], b: &[T], eq: F) -> (usize, Vec<AlignedOp>)
where
    F: Fn(&T, &T) -> bool,
{
    let table = Table::build(a, b, &eq);
    let distance = table.at(a.len(), b.len());

    let mut ops = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (a.len(), b.len());
    while i > 0 || j > 0 {
        let here = table.at(i, j);
        if i > 0 && j > 0 {
            let diag = table.at(i - 1, j - 1);
            let same = eq(&a[i - 1], &b[j - 1]);
            if same && diag == here {
                ops.push(AlignedOp {
                    kind: OpKind::Match,
                    position_a: i - 1,
                    position_b: j - 1,
                });
                i -= 1;
                j -= 1;
                continue;
            }
            if !same && diag + 1 == here {
                ops.push(AlignedOp {
                    kind: OpKind::Substitute,
                    position_a: i - 1,
                    position_b: j - 1,
                });
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && table.at(i - 1, j) + 1 == here {
            ops.push(AlignedOp {
                kind: OpKind::Delete,
                position_a: i - 1,
                position_b: j,
            });
            i -= 1;
            continue;
        }
        debug_assert!(j > 0 && table.at(i, j - 1) + 1 == here);
        ops.push(AlignedOp {
            kind: OpKind::Insert,
            position_a: i,
            position_b: j - 1,
        });
        j -= 1;
    }
    ops.reverse();
    (distance, ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn classic_pairs() {
        let eq = |x: &char, y: &char| x == y;
        assert_eq!(distance_by(&chars("kitten"), &chars("sitting"), eq), 3);
        assert_eq!(distance_by(&chars(""), &chars("abc"), eq), 3);
        assert_eq!(distance_by(&chars("abc"), &chars(""), eq), 3);
        assert_eq!(distance_by(&chars("flaw"), &chars("lawn"), eq), 2);
    }

    #[test]
    fn script_distance_agrees_with_two_row() {
        let eq = |x: &char, y: &char| x == y;
        for (a, b) in [("kitten", "sitting"), ("", "ab"), ("ab", ""), ("abc", "abc"), ("abc", "cab")] {
            let (d, ops) = script_by(&chars(a), &chars(b), eq);
            assert_eq!(d, distance_by(&chars(a), &chars(b), eq));
            assert_eq!(ops.iter().filter(|op| op.kind.is_edit()).count(), d);
        }
    }

    #[test]
    fn ties_prefer_substitute_over_delete_insert() {
        // "ab" -> "ba": two substitutions and delete+insert both cost 2.
        let (d, ops) = script_by(&chars("ab"), &chars("ba"), |x, y| x == y);
        assert_eq!(d, 2);
        let kinds: Vec<_> = ops.iter().map(|op| op.kind).collect();
        assert_eq!(kinds, vec![OpKind::Substitute, OpKind::Substitute]);
    }

    #[test]
    fn ties_prefer_delete_over_insert() {
        // "abc" -> "bcd": delete a, insert d.
        let (d, ops) = script_by(&chars("abc"), &chars("bcd"), |x, y| x == y);
        assert_eq!(d, 2);
        let kinds: Vec<_> = ops.iter().map(|op| op.kind).collect();
        assert_eq!(
            kinds,
            vec![OpKind::Delete, OpKind::Match, OpKind::Match, OpKind::Insert]
        );
    }
}
