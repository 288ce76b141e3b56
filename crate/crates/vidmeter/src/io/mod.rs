//! Parsers and canonical writers for every on-disk artifact the toolkit
//! consumes or produces: ranked retrieval runs, stratified judgment files,
//! temporal activity-instance sets, caption-ranking submissions, and
//! direct-assessment rating logs.
//!
//! All formats share the same conventions:
//!
//! * plain UTF-8 text, one record per line, LF line endings (a trailing CR
//!   is stripped so CRLF files parse identically);
//! * fields separated by arbitrary runs of spaces or tabs;
//! * identifiers are opaque tokens and may not contain whitespace;
//! * lines starting with `#` are comments, except for the header directives
//!   each format defines (`#stratum`, `#video`, `#elapsed`, ...);
//! * blank lines are ignored.
//!
//! Parsers are total: every input either produces a validated value or a
//! structured error naming the offending line or field. Nothing is silently
//! repaired — rank gaps, duplicate shots, out-of-range ratings and similar
//! defects are rejected so that scoring never runs on guessed data.
//!
//! Each `write_*` function emits the canonical form of a value: headers
//! first, records sorted on a documented key, floats in shortest
//! round-trip notation. Parsing canonical text and re-serializing it is
//! byte-identical, which is what makes archived artifacts diffable.

mod activity;
mod captions;
mod judgments;
mod ratings;
mod run;
mod scores;

pub use activity::{
    parse_activity_set, write_activity_set, ActivityFileError, ActivityInstance,
    ActivityInstanceSet, SetKind, VideoMeta,
};
pub use captions::{
    parse_caption_ranks, parse_caption_truth, write_caption_ranks, write_caption_truth,
    CaptionFileError, CaptionGroundTruth, CaptionRankSubmission,
};
pub use judgments::{
    parse_judgments, write_judgments, QrelsError, StratifiedJudgments, Stratum, StratumSpec,
    TopicJudgments,
};
pub use ratings::{parse_da_log, write_da_log, DaLogError, DaRating, DaRatingLog};
pub use run::{parse_run, write_run, RankedRun, RunEntry, RunFileError, MAX_ENTRIES_PER_TOPIC};
pub use scores::{
    parse_metric_table, parse_topic_scores, scores_by_metric, write_topic_scores, MetricTable,
    ScoreRow, ScoreTableError,
};

/// Iterates over the meaningful lines of a text artifact.
///
/// Yields `(line_number, line)` with 1-based numbering, a trailing `\r`
/// stripped, and blank lines skipped. Comment handling is left to the
/// caller because each format defines its own header directives.
pub(crate) fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(idx, line)| (idx + 1, line.strip_suffix('\r').unwrap_or(line)))
        .filter(|(_, line)| !line.trim().is_empty())
}

/// Splits a record line into whitespace-separated tokens.
pub(crate) fn tokens(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}
