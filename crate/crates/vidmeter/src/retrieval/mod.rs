//! Effectiveness measures for ranked video retrieval.
//!
//! The module covers the whole family used by the search tasks:
//!
//! * exact average precision and its mean over topics, for fully judged
//!   pools ([`average_precision`], [`mean_average_precision`]);
//! * extended inferred average precision for stratified, sampled pools
//!   ([`extended_inferred_ap`]), plus inferred precision/recall at a
//!   cutoff ([`inferred_precision_recall`]);
//! * the novelty measure, which pays more for relevant shots nobody else
//!   found ([`compute_novelty`]);
//! * uniqueness/overlap bookkeeping across teams and pairwise result
//!   overlap between runs ([`unique_overlap_analysis`], [`run_overlap_pct`]);
//! * topic difficulty classification ([`classify_topics`]);
//! * mean inverted rank for caption matching ([`mean_inverted_rank`]).

mod captions;
mod difficulty;
mod novelty;
mod precision;

pub use captions::{mean_inverted_rank, MirError, MirReport};
pub use difficulty::{classify_topics, DifficultyReport, DifficultyRow};
pub use novelty::{
    compute_novelty, pairwise_overlap, run_overlap_pct, unique_overlap_analysis, NoveltyError,
    NoveltyReport, NoveltyRunScore, NoveltyWeightEntry, PairwiseOverlap, UniqueOverlapReport,
};
pub use precision::{
    average_precision, extended_inferred_ap, inferred_precision_recall, mean_average_precision,
    score_run_topics, InferredApScore, InferredPr, RunScore, DEFAULT_EPSILON,
};

use serde::Serialize;

use crate::types::TopicId;

/// One topic's score under one measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopicScore {
    pub topic: TopicId,
    /// The measure value; the AP family always lands in `[0, 1]`.
    pub value: f64,
    /// Label of the measure that produced the value, e.g. `ap` or `xinfap`.
    pub metric: String,
    /// The (estimated) number of relevant shots the denominator used.
    pub n_relevant_est: f64,
    /// True when the value is a defined fallback rather than a measurement —
    /// the topic had no (judged) relevant shots or the run skipped it.
    pub flagged: bool,
}
