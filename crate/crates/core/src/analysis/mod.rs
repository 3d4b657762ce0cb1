//! Corpus-level statistics over aligned (original, modified) pairs.

mod bootstrap;
mod confusion;
mod distribution;
mod pairs;
mod report;
mod semantics;
mod syntax;

pub use bootstrap::{
    bootstrap_mean_ci, curve_from_observations, distance_vs_rating_curve, quantile_sorted, CurvePoint,
    DEFAULT_RESAMPLES, DEFAULT_SEED,
};
pub use confusion::{confusion_table, ConfusionTable};
pub use distribution::{
    chunk_distance_histogram, edit_distance_histogram, edit_op_distribution, histogram, op_distribution_from_counts,
    DistributionReport, OpDistribution,
};
pub use pairs::{AnalyzedPair, PairInput};
pub use report::{write_reports, AnalysisInput, AnalysisOptions, OpsReport, Report, ReportKind, COMBINED_FILE};
pub use semantics::{
    instantiate_false_analogy, opposition_stats, AbstractClass, ExplicitSide, FalseAnalogyFrame, Opposition,
    OppositionStats, OppositionTaxonomy, PairAnnotation, FALSE_ANALOGY, HIGH_LOW_STATURE, NON_OBSCENE_OBSCENE,
    SUBTYPE_SEPARATOR,
};
pub use syntax::{
    chunk_type_lift, modified_position_distribution, position_distribution, LengthGroup, LiftRow, LiftTable,
    POSITION_LENGTHS,
};
