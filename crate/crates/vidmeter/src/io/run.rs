//! The ranked-run submission format.
//!
//! A run file holds the output of one retrieval system over a set of
//! topics, at most [`MAX_ENTRIES_PER_TOPIC`] results per topic:
//!
//! ```text
//! #training D
//! #novelty true
//! #team example_team
//! #elapsed 561 12.5
//! 561 Q0 shot1005_23 1 0.97 example_run_1
//! 561 Q0 shot0311_02 2 0.95 example_run_1
//! ```
//!
//! Record lines carry six fields — `topic Q0 shot rank score tag` — with a
//! literal `Q0` in the second position and the same tag on every line.
//! The optional header directives attach metadata that has no place in the
//! record grammar: the training-data category, the novelty declaration,
//! the team attribution, and per-topic wall-clock search time. Any other
//! `#` line is a comment.
//!
//! Within a topic, ranks must be exactly `1..=n` (in any line order),
//! shots must be distinct, and scores must be non-increasing with rank.
//! Violations are rejected with a structured error, never patched up.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::types::{RunTag, ShotId, TaskKind, TeamId, TopicId, TrainingType};

use super::{content_lines, tokens};

/// Upper bound on results per topic; anything longer is rejected.
pub const MAX_ENTRIES_PER_TOPIC: usize = 1000;

/// One retrieved shot at one rank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunEntry {
    pub shot: ShotId,
    pub rank: u32,
    pub score: f64,
}

/// A validated ranked-list submission.
///
/// Construction goes through [`parse_run`] or [`RankedRun::from_parts`],
/// both of which enforce the per-topic invariants, so holders of a value
/// can rely on entries being rank-sorted, contiguous and duplicate-free.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedRun {
    pub run_tag: RunTag,
    pub task: TaskKind,
    pub training_type: TrainingType,
    /// Whether the submitter declared this a novelty-oriented run.
    pub novelty_run: bool,
    /// Team attribution; [`RankedRun::team_or_tag`] falls back to the tag.
    pub team: Option<TeamId>,
    topics: BTreeMap<TopicId, Vec<RunEntry>>,
    elapsed_seconds: BTreeMap<TopicId, f64>,
}

/// Defects a run file can be rejected for.
#[derive(Debug, Error, PartialEq)]
pub enum RunFileError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: run tag {found:?} does not match {expected:?}")]
    InconsistentRunTag {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("topic {topic}: shot {shot} retrieved more than once")]
    DuplicateShot { topic: TopicId, shot: ShotId },
    #[error("topic {topic}: more than {MAX_ENTRIES_PER_TOPIC} entries")]
    RankOverflow { topic: TopicId },
    #[error("topic {topic}: ranks are not exactly 1..=n")]
    NonContiguousRanks { topic: TopicId },
    #[error("topic {topic}: score increases at rank {rank}")]
    ScoresNotMonotone { topic: TopicId, rank: u32 },
    #[error("topic {topic}: elapsed seconds must be finite and non-negative")]
    InvalidElapsed { topic: TopicId },
}

impl RankedRun {
    /// Builds a run from already-structured parts, enforcing the same
    /// invariants as the parser. Entry lists may arrive in any order; they
    /// are sorted by rank before validation.
    pub fn from_parts(
        run_tag: RunTag,
        task: TaskKind,
        mut topics: BTreeMap<TopicId, Vec<RunEntry>>,
    ) -> Result<Self, RunFileError> {
        for entries in topics.values_mut() {
            entries.sort_by_key(|e| e.rank);
        }
        let run = RankedRun {
            run_tag,
            task,
            training_type: TrainingType::default(),
            novelty_run: false,
            team: None,
            topics,
            elapsed_seconds: BTreeMap::new(),
        };
        run.validate()?;
        Ok(run)
    }

    /// Records per-topic elapsed search time (seconds).
    pub fn with_elapsed(
        mut self,
        elapsed: BTreeMap<TopicId, f64>,
    ) -> Result<Self, RunFileError> {
        self.elapsed_seconds = elapsed;
        self.validate()?;
        Ok(self)
    }

    /// Team this run counts under; defaults to the run tag when the file
    /// declared no `#team`.
    pub fn team_or_tag(&self) -> TeamId {
        self.team
            .clone()
            .unwrap_or_else(|| TeamId::new(self.run_tag.as_str()))
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &TopicId> {
        self.topics.keys()
    }

    /// Entries for one topic, rank-sorted, or `None` if absent.
    pub fn topic_entries(&self, topic: &TopicId) -> Option<&[RunEntry]> {
        self.topics.get(topic).map(Vec::as_slice)
    }

    /// All `(topic, entries)` pairs in topic order.
    pub fn topics(&self) -> impl Iterator<Item = (&TopicId, &[RunEntry])> {
        self.topics.iter().map(|(t, e)| (t, e.as_slice()))
    }

    /// Every `(topic, shot)` pair this run retrieved, in topic-then-rank order.
    pub fn topic_shot_pairs(&self) -> impl Iterator<Item = (&TopicId, &ShotId)> {
        self.topics
            .iter()
            .flat_map(|(t, es)| es.iter().map(move |e| (t, &e.shot)))
    }

    pub fn elapsed_seconds(&self, topic: &TopicId) -> Option<f64> {
        self.elapsed_seconds.get(topic).copied()
    }

    pub fn elapsed_entries(&self) -> impl Iterator<Item = (&TopicId, f64)> {
        self.elapsed_seconds.iter().map(|(t, s)| (t, *s))
    }

    /// Checks every structural invariant. Parsed and constructed values
    /// have already passed; this is public so tests and downstream tools
    /// can verify values they assembled by other means.
    pub fn validate(&self) -> Result<(), RunFileError> {
        for (topic, entries) in &self.topics {
            if entries.len() > MAX_ENTRIES_PER_TOPIC {
                return Err(RunFileError::RankOverflow {
                    topic: topic.clone(),
                });
            }
            let mut seen = std::collections::HashSet::with_capacity(entries.len());
            for entry in entries {
                if !seen.insert(&entry.shot) {
                    return Err(RunFileError::DuplicateShot {
                        topic: topic.clone(),
                        shot: entry.shot.clone(),
                    });
                }
            }
            for (idx, entry) in entries.iter().enumerate() {
                if entry.rank as usize != idx + 1 {
                    return Err(RunFileError::NonContiguousRanks {
                        topic: topic.clone(),
                    });
                }
            }
            for pair in entries.windows(2) {
                if pair[0].score < pair[1].score {
                    return Err(RunFileError::ScoresNotMonotone {
                        topic: topic.clone(),
                        rank: pair[1].rank,
                    });
                }
            }
        }
        for (topic, seconds) in &self.elapsed_seconds {
            if !seconds.is_finite() || *seconds < 0.0 {
                return Err(RunFileError::InvalidElapsed {
                    topic: topic.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Parses a run file. `task` is out-of-band metadata: the same line grammar
/// serves both search tasks, so the caller says which one this file was
/// submitted to.
pub fn parse_run(input: &str, task: TaskKind) -> Result<RankedRun, RunFileError> {
    let mut run_tag: Option<(String, usize)> = None;
    let mut training_type = TrainingType::default();
    let mut novelty_run = false;
    let mut team: Option<TeamId> = None;
    let mut topics: BTreeMap<TopicId, Vec<RunEntry>> = BTreeMap::new();
    let mut elapsed: BTreeMap<TopicId, f64> = BTreeMap::new();

    let malformed = |line: usize, reason: &str| RunFileError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    for (line_no, line) in content_lines(input) {
        if let Some(rest) = line.strip_prefix('#') {
            let toks = tokens(rest);
            match toks.first().copied() {
                Some("training") => {
                    let [_, value] = toks[..] else {
                        return Err(malformed(line_no, "expected `#training <category>`"));
                    };
                    training_type = TrainingType::parse(value).ok_or_else(|| {
                        malformed(line_no, "training category must be A, D, E, F or other")
                    })?;
                }
                Some("novelty") => {
                    let [_, value] = toks[..] else {
                        return Err(malformed(line_no, "expected `#novelty <true|false>`"));
                    };
                    novelty_run = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(malformed(line_no, "novelty flag must be true or false")),
                    };
                }
                Some("team") => {
                    let [_, value] = toks[..] else {
                        return Err(malformed(line_no, "expected `#team <name>`"));
                    };
                    team = Some(TeamId::from(value));
                }
                Some("elapsed") => {
                    let [_, topic, seconds] = toks[..] else {
                        return Err(malformed(line_no, "expected `#elapsed <topic> <seconds>`"));
                    };
                    let seconds: f64 = seconds
                        .parse()
                        .map_err(|_| malformed(line_no, "elapsed seconds must be a number"))?;
                    elapsed.insert(TopicId::from(topic), seconds);
                }
                _ => {} // ordinary comment
            }
            continue;
        }

        let toks = tokens(line);
        let [topic, q0, shot, rank, score, tag] = toks[..] else {
            return Err(malformed(
                line_no,
                "expected `topic Q0 shot rank score tag`",
            ));
        };
        if q0 != "Q0" {
            return Err(malformed(line_no, "second field must be the literal Q0"));
        }
        let rank: u32 = rank
            .parse()
            .map_err(|_| malformed(line_no, "rank must be a positive integer"))?;
        if rank == 0 {
            return Err(malformed(line_no, "rank must be a positive integer"));
        }
        let score: f64 = score
            .parse()
            .map_err(|_| malformed(line_no, "score must be a number"))?;
        if !score.is_finite() {
            return Err(malformed(line_no, "score must be finite"));
        }
        match &run_tag {
            None => run_tag = Some((tag.to_owned(), line_no)),
            Some((expected, _)) if expected != tag => {
                return Err(RunFileError::InconsistentRunTag {
                    line: line_no,
                    expected: expected.clone(),
                    found: tag.to_owned(),
                });
            }
            Some(_) => {}
        }
        topics.entry(TopicId::from(topic)).or_default().push(RunEntry {
            shot: ShotId::from(shot),
            rank,
            score,
        });
    }

    let tag = RunTag::new(run_tag.map(|(t, _)| t).unwrap_or_default());
    let mut run = RankedRun::from_parts(tag, task, topics)?.with_elapsed(elapsed)?;
    run.training_type = training_type;
    run.novelty_run = novelty_run;
    run.team = team;
    Ok(run)
}

/// Serializes a run in canonical form: directives first (defaults omitted),
/// then entries sorted by topic and rank. Scores use shortest round-trip
/// float notation, so canonical files survive a parse/write cycle
/// byte-for-byte.
pub fn write_run(run: &RankedRun) -> String {
    let mut out = String::new();
    if run.training_type != TrainingType::Other {
        out.push_str(&format!("#training {}\n", run.training_type));
    }
    if run.novelty_run {
        out.push_str("#novelty true\n");
    }
    if let Some(team) = &run.team {
        out.push_str(&format!("#team {team}\n"));
    }
    for (topic, seconds) in &run.elapsed_seconds {
        out.push_str(&format!("#elapsed {topic} {seconds}\n"));
    }
    for (topic, entries) in &run.topics {
        for entry in entries {
            out.push_str(&format!(
                "{topic} Q0 {} {} {} {}\n",
                entry.shot, entry.rank, entry.score, run.run_tag
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(shot: &str, rank: u32, score: f64) -> RunEntry {
        RunEntry {
            shot: ShotId::from(shot),
            rank,
            score,
        }
    }

    #[test]
    fn parses_a_small_run() {
        let text = "\
# a comment
#training D
#novelty true
#team t1
#elapsed 561 12.5
561 Q0 shotA 1 0.9 run1
561 Q0 shotB 2 0.8 run1
562 Q0 shotC 1 0.7 run1
";
        let run = parse_run(text, TaskKind::Adhoc).unwrap();
        assert_eq!(run.run_tag, RunTag::from("run1"));
        assert_eq!(run.training_type, TrainingType::D);
        assert!(run.novelty_run);
        assert_eq!(run.team, Some(TeamId::from("t1")));
        assert_eq!(run.elapsed_seconds(&TopicId::from("561")), Some(12.5));
        assert_eq!(
            run.topic_entries(&TopicId::from("561")).unwrap(),
            &[entry("shotA", 1, 0.9), entry("shotB", 2, 0.8)]
        );
    }

    #[test]
    fn lines_may_arrive_out_of_rank_order() {
        let text = "561 Q0 b 2 0.5 r\n561 Q0 a 1 0.9 r\n";
        let run = parse_run(text, TaskKind::Adhoc).unwrap();
        assert_eq!(
            run.topic_entries(&TopicId::from("561")).unwrap(),
            &[entry("a", 1, 0.9), entry("b", 2, 0.5)]
        );
    }

    #[test]
    fn rejects_more_than_the_entry_limit() {
        let mut text = String::new();
        for rank in 1..=(MAX_ENTRIES_PER_TOPIC + 1) {
            text.push_str(&format!("561 Q0 shot{rank} {rank} {} r\n", 2.0 - rank as f64 / 1000.0));
        }
        let err = parse_run(&text, TaskKind::Adhoc).unwrap_err();
        assert_eq!(
            err,
            RunFileError::RankOverflow {
                topic: TopicId::from("561")
            }
        );
    }

    #[test]
    fn rejects_rank_gap_and_duplicate_rank() {
        let gap = "561 Q0 a 1 0.9 r\n561 Q0 b 3 0.8 r\n";
        assert_eq!(
            parse_run(gap, TaskKind::Adhoc).unwrap_err(),
            RunFileError::NonContiguousRanks {
                topic: TopicId::from("561")
            }
        );
        let dup = "561 Q0 a 1 0.9 r\n561 Q0 b 1 0.8 r\n";
        assert_eq!(
            parse_run(dup, TaskKind::Adhoc).unwrap_err(),
            RunFileError::NonContiguousRanks {
                topic: TopicId::from("561")
            }
        );
    }

    #[test]
    fn rejects_duplicate_shot_within_topic() {
        let text = "561 Q0 a 1 0.9 r\n561 Q0 a 2 0.8 r\n";
        assert_eq!(
            parse_run(text, TaskKind::Adhoc).unwrap_err(),
            RunFileError::DuplicateShot {
                topic: TopicId::from("561"),
                shot: ShotId::from("a")
            }
        );
    }

    #[test]
    fn same_shot_on_two_topics_is_fine() {
        let text = "561 Q0 a 1 0.9 r\n562 Q0 a 1 0.8 r\n";
        assert!(parse_run(text, TaskKind::Adhoc).is_ok());
    }

    #[test]
    fn rejects_increasing_scores_but_allows_ties() {
        let increasing = "561 Q0 a 1 0.5 r\n561 Q0 b 2 0.9 r\n";
        assert_eq!(
            parse_run(increasing, TaskKind::Adhoc).unwrap_err(),
            RunFileError::ScoresNotMonotone {
                topic: TopicId::from("561"),
                rank: 2
            }
        );
        let tied = "561 Q0 a 1 0.5 r\n561 Q0 b 2 0.5 r\n";
        assert!(parse_run(tied, TaskKind::Adhoc).is_ok());
    }

    #[test]
    fn rejects_missing_q0_and_short_lines() {
        assert!(matches!(
            parse_run("561 QX a 1 0.9 r\n", TaskKind::Adhoc),
            Err(RunFileError::MalformedLine { line: 1, .. })
        ));
        assert!(matches!(
            parse_run("561 Q0 a 1 0.9\n", TaskKind::Adhoc),
            Err(RunFileError::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn rejects_inconsistent_run_tag() {
        let text = "561 Q0 a 1 0.9 r1\n561 Q0 b 2 0.8 r2\n";
        assert!(matches!(
            parse_run(text, TaskKind::Adhoc),
            Err(RunFileError::InconsistentRunTag { line: 2, .. })
        ));
    }

    #[test]
    fn canonical_text_round_trips_byte_for_byte() {
        let text = "\
#training A
#novelty true
#team t9
#elapsed 561 3.25
561 Q0 a 1 0.9 r
561 Q0 b 2 0.8 r
562 Q0 c 1 0.75 r
";
        let run = parse_run(text, TaskKind::Instance).unwrap();
        assert_eq!(write_run(&run), text);
        assert_eq!(parse_run(&write_run(&run), TaskKind::Instance).unwrap(), run);
    }
}
