//! Report emission: one CSV per report plus a combined JSON document.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::{
    chunk_type_lift, confusion_table, distance_vs_rating_curve, edit_distance_histogram, edit_op_distribution,
    modified_position_distribution, opposition_stats, AnalyzedPair, ConfusionTable, CurvePoint, DistributionReport,
    LiftTable, OpDistribution, OppositionStats, OppositionTaxonomy, PairAnnotation,
};
use crate::chunking::ChunkSequence;
use crate::error::{Error, Result};
use crate::game::ConsensusClass;
use crate::records::Origin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReportKind {
    EditDist,
    Ops,
    Tradeoff,
    Lift,
    Positions,
    Confusion,
    Oppositions,
}

impl ReportKind {
    pub const ALL: [ReportKind; 7] = [
        ReportKind::EditDist,
        ReportKind::Ops,
        ReportKind::Tradeoff,
        ReportKind::Lift,
        ReportKind::Positions,
        ReportKind::Confusion,
        ReportKind::Oppositions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReportKind::EditDist => "edit-dist",
            ReportKind::Ops => "ops",
            ReportKind::Tradeoff => "tradeoff",
            ReportKind::Lift => "lift",
            ReportKind::Positions => "positions",
            ReportKind::Confusion => "confusion",
            ReportKind::Oppositions => "oppositions",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.csv", self.as_str())
    }
}

impl fmt::Display for ReportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReportKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid("report", s))
    }
}

pub const COMBINED_FILE: &str = "report.json";

/// Snapshot of everything the reports are computed from.
#[derive(Debug, Clone, Default)]
pub struct AnalysisInput {
    /// Every (original, modified) pair, rated or not.
    pub pairs: Vec<AnalyzedPair>,
    /// Ratings of every headline, keyed by origin; used for the confusion table.
    pub rated_headlines: Vec<(Origin, Vec<f64>)>,
    /// Chunkings of all satirical corpus headlines: the lift prior.
    pub satirical_chunks: Vec<ChunkSequence>,
    pub annotations: Option<Vec<PairAnnotation>>,
    pub taxonomy: OppositionTaxonomy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub seed: u64,
    pub resamples: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            seed: super::DEFAULT_SEED,
            resamples: super::DEFAULT_RESAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpsReport {
    pub all: OpDistribution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_1: Option<OpDistribution>,
}

/// Computed result of one report.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    EditDist(DistributionReport),
    Ops(OpsReport),
    Tradeoff(Vec<CurvePoint>),
    Lift(LiftTable),
    Positions(BTreeMap<String, DistributionReport>),
    Confusion(ConfusionTable),
    Oppositions(OppositionStats),
}

impl AnalysisInput {
    /// Pairs with consensus serious and at least two ratings.
    pub fn successful_pairs(&self) -> Vec<AnalyzedPair> {
        self.pairs.iter().filter(|p| p.is_successful()).cloned().collect()
    }

    /// Histogram, op mix, lift and positions describe successful pairs;
    /// the tradeoff curve uses every pair with two or more ratings.
    pub fn compute(&self, kind: ReportKind, opts: &AnalysisOptions) -> Result<Report> {
        let successful = || {
            let s = self.successful_pairs();
            if s.is_empty() {
                Err(Error::domain("no successful pairs"))
            } else {
                Ok(s)
            }
        };
        Ok(match kind {
            ReportKind::EditDist => Report::EditDist(edit_distance_histogram(&successful()?)?),
            ReportKind::Ops => {
                let pairs = successful()?;
                Report::Ops(OpsReport {
                    all: edit_op_distribution(&pairs, None)?,
                    distance_1: edit_op_distribution(&pairs, Some(1)).ok(),
                })
            }
            ReportKind::Tradeoff => {
                let curve = distance_vs_rating_curve(&self.pairs, opts.resamples, opts.seed)?;
                if curve.is_empty() {
                    return Err(Error::domain("no pair has two or more ratings"));
                }
                Report::Tradeoff(curve)
            }
            ReportKind::Lift => {
                let subs: Vec<_> = successful()?.into_iter().filter_map(|p| p.single_substitution).collect();
                Report::Lift(chunk_type_lift(&subs, &self.satirical_chunks)?)
            }
            ReportKind::Positions => Report::Positions(
                modified_position_distribution(&successful()?)?
                    .into_iter()
                    .map(|(g, d)| (g.to_string(), d))
                    .collect(),
            ),
            ReportKind::Confusion => {
                let table = confusion_table(self.rated_headlines.iter().map(|(o, r)| (*o, r.as_slice())));
                if table.counts.iter().flatten().all(|&c| c == 0) {
                    return Err(Error::domain("no headline has two or more ratings"));
                }
                Report::Confusion(table)
            }
            ReportKind::Oppositions => {
                let annotations = self
                    .annotations
                    .as_deref()
                    .ok_or_else(|| Error::domain("the oppositions report needs an annotation file"))?;
                Report::Oppositions(opposition_stats(annotations, &self.taxonomy)?)
            }
        })
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

impl Report {
    /// Header followed by data rows.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut push = |cells: Vec<String>| rows.push(cells);
        match self {
            Report::EditDist(d) => {
                push(vec!["distance".into(), "fraction".into(), "cumulative".into(), "n".into()]);
                for ((b, f), c) in d.buckets.iter().zip(&d.fractions).zip(d.cumulative()) {
                    push(vec![b.clone(), num(*f), num(c), d.sample_size.to_string()]);
                }
            }
            Report::Ops(ops) => {
                push(vec!["subset".into(), "op".into(), "macro_average".into(), "micro_average".into(), "n".into()]);
                let subsets = std::iter::once(("all", &ops.all)).chain(ops.distance_1.as_ref().map(|d| ("distance_1", d)));
                for (name, d) in subsets {
                    for (i, op) in d.macro_average.buckets.iter().enumerate() {
                        push(vec![
                            name.into(),
                            op.clone(),
                            num(d.macro_average.fractions[i]),
                            num(d.micro_average.fractions[i]),
                            d.macro_average.sample_size.to_string(),
                        ]);
                    }
                }
            }
            Report::Tradeoff(curve) => {
                push(["distance", "n", "mean_rating", "ci_low", "ci_high"].map(String::from).to_vec());
                for p in curve {
                    push(vec![p.distance.to_string(), p.n.to_string(), num(p.mean_rating), num(p.ci_low), num(p.ci_high)]);
                }
            }
            Report::Lift(t) => {
                push(
                    ["chunk_type", "modified_count", "modified_fraction", "prior_count", "prior_fraction", "lift"]
                        .map(String::from)
                        .to_vec(),
                );
                for r in &t.rows {
                    push(vec![
                        r.label.as_str().into(),
                        r.modified_count.to_string(),
                        num(r.modified_fraction),
                        r.prior_count.to_string(),
                        num(r.prior_fraction),
                        r.lift.map_or_else(|| "NA".into(), num),
                    ]);
                }
            }
            Report::Positions(groups) => {
                push(["chunk_count", "position", "fraction", "n"].map(String::from).to_vec());
                for (g, d) in groups {
                    for (b, f) in d.buckets.iter().zip(&d.fractions) {
                        push(vec![g.clone(), b.clone(), num(*f), d.sample_size.to_string()]);
                    }
                }
            }
            Report::Confusion(t) => {
                push(
                    std::iter::once("class".to_string())
                        .chain(Origin::ALL.iter().map(|o| o.as_str().to_string()))
                        .collect(),
                );
                for class in ConsensusClass::ALL {
                    push(
                        std::iter::once(class.as_str().to_string())
                            .chain(Origin::ALL.iter().map(|&o| t.get(class, o).to_string()))
                            .collect(),
                    );
                }
            }
            Report::Oppositions(s) => {
                push(["kind", "label", "fraction", "n"].map(String::from).to_vec());
                let n = s.annotated_pairs.to_string();
                for (label, f) in &s.oppositions {
                    push(vec!["opposition".into(), label.clone(), num(*f), n.clone()]);
                }
                for (class, f) in &s.abstract_classes {
                    push(vec!["abstract_class".into(), class.as_str().into(), num(*f), n.clone()]);
                }
                for (m, f) in &s.mechanisms {
                    push(vec!["mechanism".into(), m.clone(), num(*f), n.clone()]);
                }
            }
        }
        rows
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.csv_rows() {
            w.write_record(&row)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

#[derive(Serialize)]
struct Combined<'a> {
    seed: u64,
    resamples: usize,
    reports: BTreeMap<&'static str, &'a Report>,
}

/// Computes `kinds` and writes `<kind>.csv` for each plus the combined
/// JSON into `out_dir`. Returns the paths written, JSON last.
pub fn write_reports(
    input: &AnalysisInput,
    kinds: &[ReportKind],
    opts: &AnalysisOptions,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    let reports: Vec<(ReportKind, Report)> = kinds
        .iter()
        .map(|&k| Ok((k, input.compute(k, opts)?)))
        .collect::<Result<_>>()?;

    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for (kind, report) in &reports {
        let path = out_dir.join(kind.file_name());
        fs::write(&path, report.to_csv()?)?;
        written.push(path);
    }
    let combined = Combined {
        seed: opts.seed,
        resamples: opts.resamples,
        reports: reports.iter().map(|(k, r)| (k.as_str(), r)).collect(),
    };
    let mut json = serde_json::to_vec_pretty(&combined)?;
    json.push(b'\n');
    let path = out_dir.join(COMBINED_FILE);
    fs::write(&path, json)?;
    written.push(path);
    Ok(written)
}
