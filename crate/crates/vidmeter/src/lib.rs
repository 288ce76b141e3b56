//! Scoring library for video-retrieval and activity-detection benchmarks.
//!
//! The crate covers the full evaluation pipeline used by large shared-task
//! video benchmarks:
//!
//! - [`io`] — strict parsers and canonical writers for ranked runs,
//!   stratified relevance judgments, activity instance sets, caption
//!   ranking files, crowd rating logs, and score tables;
//! - [`pooling`] — stratified pooling of runs, seeded sampling, and
//!   judging statistics;
//! - [`retrieval`] — average precision, the stratified inferred-AP
//!   estimator, novelty scoring, overlap analyses, topic difficulty, and
//!   mean inverted rank;
//! - [`actev`] — activity-detection scoring: instance alignment, miss and
//!   false-alarm rates, DET curves, and the normalized area under them;
//! - [`stats`] — randomization significance tests, significance grouping,
//!   Pearson correlation, and rating standardization with worker QC.
//!
//! All computations are deterministic: random choices are driven by
//! explicit seeds, parallel folds preserve sorted key order, and writers
//! emit canonical bytes.

pub mod actev;
pub mod io;
pub mod pooling;
pub mod retrieval;
pub mod stats;
pub mod types;
