//! Topic difficulty classification.
//!
//! A topic is "easy" for the submitted systems when at least as many runs
//! score at or above the task's threshold as below it; otherwise it is
//! "hard". Topics are reported sorted from most to least agreed-upon-easy,
//! so the head of the table is the easiest topic and the tail the hardest.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::types::{RunTag, TopicId};
use std::collections::BTreeMap;

/// One topic's standing against the difficulty threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifficultyRow {
    pub topic: TopicId,
    /// Runs whose score on this topic is `>= threshold`. Runs missing the
    /// topic count as below.
    pub runs_at_or_above: usize,
    pub total_runs: usize,
    /// `runs_at_or_above >= total_runs - runs_at_or_above`.
    pub easy: bool,
}

/// Topics ordered from easiest to hardest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DifficultyReport {
    pub threshold: f64,
    /// Sorted descending by `runs_at_or_above`; ties by topic ascending.
    pub rows: Vec<DifficultyRow>,
}

/// Classifies every topic appearing in any run's score map.
///
/// `scores` maps run tag → topic → score (e.g. average precision). The
/// threshold must lie strictly inside (0, 1); typical values are 0.3 for
/// ad-hoc search and 0.06 for instance search.
pub fn classify_topics(
    scores: &BTreeMap<RunTag, BTreeMap<TopicId, f64>>,
    threshold: f64,
) -> DifficultyReport {
    assert!(
        threshold > 0.0 && threshold < 1.0,
        "difficulty threshold must lie in (0, 1), got {threshold}"
    );
    let total_runs = scores.len();
    let topics: BTreeSet<&TopicId> = scores.values().flat_map(|m| m.keys()).collect();

    let mut rows: Vec<DifficultyRow> = topics
        .into_iter()
        .map(|topic| {
            let runs_at_or_above = scores
                .values()
                .filter(|per_topic| {
                    per_topic
                        .get(topic)
                        .is_some_and(|&score| score >= threshold)
                })
                .count();
            DifficultyRow {
                topic: topic.clone(),
                runs_at_or_above,
                total_runs,
                easy: runs_at_or_above >= total_runs - runs_at_or_above,
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.runs_at_or_above
            .cmp(&a.runs_at_or_above)
            .then_with(|| a.topic.cmp(&b.topic))
    });
    DifficultyReport { threshold, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(entries: &[(&str, &[(&str, f64)])]) -> BTreeMap<RunTag, BTreeMap<TopicId, f64>> {
        entries
            .iter()
            .map(|(tag, topics)| {
                (
                    RunTag::from(*tag),
                    topics
                        .iter()
                        .map(|(t, v)| (TopicId::from(*t), *v))
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn unanimous_topic_ranks_first() {
        let scores = table(&[
            ("r1", &[("t1", 0.5), ("t2", 0.1)]),
            ("r2", &[("t1", 0.31), ("t2", 0.4)]),
        ]);
        let report = classify_topics(&scores, 0.3);
        assert_eq!(report.rows[0].topic, TopicId::from("t1"));
        assert_eq!(report.rows[0].runs_at_or_above, 2);
        assert!(report.rows[0].easy);
        // t2: 1 of 2 at/above — the tie goes to easy.
        assert!(report.rows[1].easy);
    }

    #[test]
    fn majority_below_is_hard() {
        let scores = table(&[
            ("r1", &[("t1", 0.05)]),
            ("r2", &[("t1", 0.05)]),
            ("r3", &[("t1", 0.07)]),
        ]);
        let report = classify_topics(&scores, 0.06);
        assert_eq!(report.rows[0].runs_at_or_above, 1);
        assert!(!report.rows[0].easy);
    }

    #[test]
    fn instance_search_style_split_at_006() {
        // Construction: five runs; on `easy_a` four score above 0.06, on
        // `easy_b` three, on `hard_a` two, on `hard_b` none.
        let mk = |a: f64, b: f64, c: f64, d: f64| {
            [("easy_a", a), ("easy_b", b), ("hard_a", c), ("hard_b", d)]
        };
        let scores = table(&[
            ("r1", &mk(0.5, 0.2, 0.01, 0.0)),
            ("r2", &mk(0.4, 0.3, 0.09, 0.01)),
            ("r3", &mk(0.061, 0.07, 0.02, 0.0)),
            ("r4", &mk(0.2, 0.01, 0.3, 0.0)),
            ("r5", &mk(0.04, 0.02, 0.05, 0.05)),
        ]);
        let report = classify_topics(&scores, 0.06);
        let by_topic: BTreeMap<&str, &DifficultyRow> = report
            .rows
            .iter()
            .map(|r| (r.topic.as_str(), r))
            .collect();
        assert!(by_topic["easy_a"].easy);
        assert!(by_topic["easy_b"].easy);
        assert!(!by_topic["hard_a"].easy);
        assert!(!by_topic["hard_b"].easy);
        let order: Vec<&str> = report.rows.iter().map(|r| r.topic.as_str()).collect();
        assert_eq!(order, vec!["easy_a", "easy_b", "hard_a", "hard_b"]);
    }

    #[test]
    fn all_zero_counts_fall_back_to_topic_order() {
        let scores = table(&[
            ("r1", &[("t3", 0.0), ("t1", 0.0), ("t2", 0.0)]),
            ("r2", &[("t3", 0.01), ("t1", 0.0), ("t2", 0.0)]),
        ]);
        let report = classify_topics(&scores, 0.3);
        let order: Vec<&str> = report.rows.iter().map(|r| r.topic.as_str()).collect();
        assert_eq!(order, vec!["t1", "t2", "t3"]);
        assert!(report.rows.iter().all(|r| !r.easy));
    }

    #[test]
    fn missing_topic_counts_as_below_threshold() {
        let scores = table(&[("r1", &[("t1", 0.9)]), ("r2", &[])]);
        let report = classify_topics(&scores, 0.3);
        assert_eq!(report.rows[0].runs_at_or_above, 1);
        assert_eq!(report.rows[0].total_runs, 2);
        assert!(report.rows[0].easy); // 1 at/above vs 1 below: tie → easy
    }
}
