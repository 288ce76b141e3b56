//! The stratified relevance-judgment format.
//!
//! Judgment files describe, per topic, which pool strata existed, how large
//! each stratum was, and the binary judgment for every shot that was drawn
//! and assessed:
//!
//! ```text
//! #stratum 561 top 1 250 4500
//! #stratum 561 bottom 251 1000 9000
//! 561 top shot1005_23 1
//! 561 bottom shot0312_07 0
//! ```
//!
//! A `#stratum` header carries `topic stratum rank_lo rank_hi pool_size`,
//! where `pool_size` is the number of distinct shots the stratum held
//! before sampling. The realized sampling rate is therefore derivable and
//! is not stated in the file: `judged_in_stratum / pool_size`. Keeping the
//! rate implicit means a judgment file can never contradict itself.
//!
//! Judgments are strictly binary. Graded values were deliberately dropped
//! from this campaign's protocol, so anything other than `0` or `1` is
//! rejected rather than thresholded.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::types::{ShotId, StratumId, TopicId};

use super::{content_lines, tokens};

/// One sampling stratum of one topic's pool.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stratum {
    pub id: StratumId,
    /// Lowest submission rank the stratum covers (1-based, inclusive).
    pub rank_lo: u32,
    /// Highest submission rank the stratum covers (inclusive).
    pub rank_hi: u32,
    /// Distinct shots the stratum contained before sampling.
    pub pool_size: u64,
    /// Shots actually judged (drawn by the sampler).
    pub judged: u64,
    /// Judged shots found relevant.
    pub judged_relevant: u64,
    /// `judged / pool_size`; always in `(0, 1]`.
    pub sampling_rate: f64,
}

/// Declares a stratum before judged counts are known; used with
/// [`TopicJudgments::from_parts`] when assembling values in code.
#[derive(Clone, Debug, PartialEq)]
pub struct StratumSpec {
    pub id: StratumId,
    pub rank_lo: u32,
    pub rank_hi: u32,
    pub pool_size: u64,
}

/// Everything judged for one topic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopicJudgments {
    strata: Vec<Stratum>,
    judgments: BTreeMap<ShotId, (usize, bool)>,
}

/// A validated judgment file: topics with strata and binary judgments.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StratifiedJudgments {
    topics: BTreeMap<TopicId, TopicJudgments>,
}

/// Defects a judgment file can be rejected for.
#[derive(Debug, Error, PartialEq)]
pub enum QrelsError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: relevance must be 0 or 1, got {value}")]
    GradedValue { line: usize, value: String },
    #[error("line {line}: stratum {stratum} of topic {topic} was never declared")]
    UnknownStratum {
        line: usize,
        topic: TopicId,
        stratum: StratumId,
    },
    #[error("topic {topic}: stratum {stratum} declared twice")]
    DuplicateStratum { topic: TopicId, stratum: StratumId },
    #[error("topic {topic}: shot {shot} judged twice")]
    ShotJudgedTwice { topic: TopicId, shot: ShotId },
    #[error("topic {topic}: declared but has no judgments")]
    EmptyTopic { topic: TopicId },
    #[error("topic {topic}: stratum {stratum} has no judged shots")]
    EmptyStratum { topic: TopicId, stratum: StratumId },
    #[error("topic {topic}: stratum {stratum} has more judged shots than its pool size")]
    JudgedExceedsPool { topic: TopicId, stratum: StratumId },
    #[error("topic {topic}: stratum rank ranges overlap")]
    OverlappingStrata { topic: TopicId },
}

impl TopicJudgments {
    /// Assembles one topic's judgments from declared strata plus
    /// `(shot, stratum, relevant)` triples, enforcing the same rules as
    /// the file parser. `topic` is only used in error messages.
    pub fn from_parts(
        topic: &TopicId,
        strata: Vec<StratumSpec>,
        judgments: Vec<(ShotId, StratumId, bool)>,
    ) -> Result<Self, QrelsError> {
        let mut built: Vec<Stratum> = Vec::with_capacity(strata.len());
        for spec in strata {
            if built.iter().any(|s| s.id == spec.id) {
                return Err(QrelsError::DuplicateStratum {
                    topic: topic.clone(),
                    stratum: spec.id,
                });
            }
            if spec.rank_lo == 0 || spec.rank_lo > spec.rank_hi || spec.pool_size == 0 {
                return Err(QrelsError::MalformedLine {
                    line: 0,
                    reason: format!(
                        "stratum {} of topic {topic} needs 1 <= rank_lo <= rank_hi and a positive pool size",
                        spec.id
                    ),
                });
            }
            built.push(Stratum {
                id: spec.id,
                rank_lo: spec.rank_lo,
                rank_hi: spec.rank_hi,
                pool_size: spec.pool_size,
                judged: 0,
                judged_relevant: 0,
                sampling_rate: 0.0,
            });
        }

        let mut map: BTreeMap<ShotId, (usize, bool)> = BTreeMap::new();
        for (shot, stratum_id, relevant) in judgments {
            let idx = built.iter().position(|s| s.id == stratum_id).ok_or_else(|| {
                QrelsError::UnknownStratum {
                    line: 0,
                    topic: topic.clone(),
                    stratum: stratum_id.clone(),
                }
            })?;
            if map.insert(shot.clone(), (idx, relevant)).is_some() {
                return Err(QrelsError::ShotJudgedTwice {
                    topic: topic.clone(),
                    shot,
                });
            }
            built[idx].judged += 1;
            if relevant {
                built[idx].judged_relevant += 1;
            }
        }

        if map.is_empty() {
            return Err(QrelsError::EmptyTopic {
                topic: topic.clone(),
            });
        }
        for stratum in &mut built {
            if stratum.judged == 0 {
                return Err(QrelsError::EmptyStratum {
                    topic: topic.clone(),
                    stratum: stratum.id.clone(),
                });
            }
            if stratum.judged > stratum.pool_size {
                return Err(QrelsError::JudgedExceedsPool {
                    topic: topic.clone(),
                    stratum: stratum.id.clone(),
                });
            }
            stratum.sampling_rate = stratum.judged as f64 / stratum.pool_size as f64;
        }
        let mut by_lo: Vec<(u32, u32)> = built.iter().map(|s| (s.rank_lo, s.rank_hi)).collect();
        by_lo.sort_unstable();
        if by_lo.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(QrelsError::OverlappingStrata {
                topic: topic.clone(),
            });
        }

        // Strata are stored in rank order; re-point judgments from
        // declaration order to the sorted order.
        let mut order: Vec<usize> = (0..built.len()).collect();
        order.sort_by_key(|&i| built[i].rank_lo);
        let mut new_index = vec![0usize; built.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut strata: Vec<Option<Stratum>> = built.into_iter().map(Some).collect();
        let strata: Vec<Stratum> = order
            .iter()
            .map(|&old| strata[old].take().expect("each stratum moved once"))
            .collect();
        Ok(TopicJudgments {
            judgments: map
                .into_iter()
                .map(|(shot, (old_idx, rel))| (shot, (new_index[old_idx], rel)))
                .collect(),
            strata,
        })
    }

    /// Strata in ascending rank order.
    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    /// The stratum and judgment recorded for a shot, if it was judged.
    pub fn judgment(&self, shot: &ShotId) -> Option<(&Stratum, bool)> {
        self.judgments
            .get(shot)
            .map(|(idx, rel)| (&self.strata[*idx], *rel))
    }

    pub fn is_judged_relevant(&self, shot: &ShotId) -> bool {
        matches!(self.judgments.get(shot), Some((_, true)))
    }

    /// The stratum whose rank range covers `rank`, if any.
    pub fn stratum_for_rank(&self, rank: u32) -> Option<&Stratum> {
        self.strata
            .iter()
            .find(|s| s.rank_lo <= rank && rank <= s.rank_hi)
    }

    /// Like [`TopicJudgments::judgment`], but returns the stratum's index
    /// into [`TopicJudgments::strata`] instead of the stratum itself.
    pub fn judgment_indexed(&self, shot: &ShotId) -> Option<(usize, bool)> {
        self.judgments.get(shot).copied()
    }

    /// Index of the stratum whose rank range covers `rank`, if any.
    pub fn stratum_index_for_rank(&self, rank: u32) -> Option<usize> {
        self.strata
            .iter()
            .position(|s| s.rank_lo <= rank && rank <= s.rank_hi)
    }

    pub fn judged_count(&self) -> u64 {
        self.judgments.len() as u64
    }

    pub fn relevant_count(&self) -> u64 {
        self.strata.iter().map(|s| s.judged_relevant).sum()
    }

    /// Estimated total relevant in the collection: each stratum's relevant
    /// count scaled up by the inverse of its sampling rate.
    pub fn estimated_relevant(&self) -> f64 {
        self.strata
            .iter()
            .map(|s| s.judged_relevant as f64 / s.sampling_rate)
            .sum()
    }

    /// All judged shots in shot order as `(shot, stratum, relevant)`.
    pub fn judgments(&self) -> impl Iterator<Item = (&ShotId, &Stratum, bool)> {
        self.judgments
            .iter()
            .map(|(shot, (idx, rel))| (shot, &self.strata[*idx], *rel))
    }

    /// Judged-relevant shots in shot order.
    pub fn relevant_shots(&self) -> impl Iterator<Item = &ShotId> {
        self.judgments
            .iter()
            .filter(|(_, (_, rel))| *rel)
            .map(|(shot, _)| shot)
    }
}

impl StratifiedJudgments {
    /// Wraps already-validated per-topic values.
    pub fn from_topics(topics: BTreeMap<TopicId, TopicJudgments>) -> Self {
        StratifiedJudgments { topics }
    }

    pub fn topic(&self, id: &TopicId) -> Option<&TopicJudgments> {
        self.topics.get(id)
    }

    pub fn topic_ids(&self) -> impl Iterator<Item = &TopicId> {
        self.topics.keys()
    }

    pub fn topics(&self) -> impl Iterator<Item = (&TopicId, &TopicJudgments)> {
        self.topics.iter()
    }

    pub fn topic_count(&self) -> usize {
        self.topics.len()
    }

    /// Re-checks every invariant on an assembled value: positive disjoint
    /// rank ranges, per-stratum counts consistent with the judgment map,
    /// rates in `(0, 1]`. Parser output always passes; this exists so other
    /// construction paths can be audited independently.
    pub fn validate(&self) -> Result<(), QrelsError> {
        for (topic, tj) in &self.topics {
            if tj.judgments.is_empty() {
                return Err(QrelsError::EmptyTopic {
                    topic: topic.clone(),
                });
            }
            let mut by_lo: Vec<(u32, u32)> =
                tj.strata.iter().map(|s| (s.rank_lo, s.rank_hi)).collect();
            by_lo.sort_unstable();
            if by_lo.windows(2).any(|w| w[0].1 >= w[1].0) {
                return Err(QrelsError::OverlappingStrata {
                    topic: topic.clone(),
                });
            }
            for (idx, stratum) in tj.strata.iter().enumerate() {
                let judged = tj.judgments.values().filter(|(i, _)| *i == idx).count() as u64;
                let relevant = tj
                    .judgments
                    .values()
                    .filter(|(i, rel)| *i == idx && *rel)
                    .count() as u64;
                let rate_ok = (stratum.sampling_rate
                    - stratum.judged as f64 / stratum.pool_size as f64)
                    .abs()
                    < 1e-12;
                if judged == 0 {
                    return Err(QrelsError::EmptyStratum {
                        topic: topic.clone(),
                        stratum: stratum.id.clone(),
                    });
                }
                if stratum.judged != judged
                    || stratum.judged_relevant != relevant
                    || !rate_ok
                    || stratum.sampling_rate <= 0.0
                    || stratum.sampling_rate > 1.0
                {
                    return Err(QrelsError::JudgedExceedsPool {
                        topic: topic.clone(),
                        stratum: stratum.id.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses a stratified judgment file.
pub fn parse_judgments(input: &str) -> Result<StratifiedJudgments, QrelsError> {
    let malformed = |line: usize, reason: &str| QrelsError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    // First pass: stratum declarations. Headers may appear anywhere, so
    // records are resolved only once all declarations are known.
    let mut specs: BTreeMap<TopicId, Vec<StratumSpec>> = BTreeMap::new();
    for (line_no, line) in content_lines(input) {
        let Some(rest) = line.strip_prefix('#') else {
            continue;
        };
        let toks = tokens(rest);
        if toks.first().copied() != Some("stratum") {
            continue; // ordinary comment
        }
        let [_, topic, stratum, lo, hi, pool] = toks[..] else {
            return Err(malformed(
                line_no,
                "expected `#stratum topic stratum rank_lo rank_hi pool_size`",
            ));
        };
        let rank_lo: u32 = lo
            .parse()
            .map_err(|_| malformed(line_no, "rank_lo must be a positive integer"))?;
        let rank_hi: u32 = hi
            .parse()
            .map_err(|_| malformed(line_no, "rank_hi must be a positive integer"))?;
        let pool_size: u64 = pool
            .parse()
            .map_err(|_| malformed(line_no, "pool_size must be a non-negative integer"))?;
        if rank_lo == 0 || rank_lo > rank_hi {
            return Err(malformed(line_no, "need 1 <= rank_lo <= rank_hi"));
        }
        if pool_size == 0 {
            return Err(malformed(line_no, "pool_size must be positive"));
        }
        let topic = TopicId::from(topic);
        let spec = StratumSpec {
            id: StratumId::from(stratum),
            rank_lo,
            rank_hi,
            pool_size,
        };
        let entry = specs.entry(topic.clone()).or_default();
        if entry.iter().any(|s| s.id == spec.id) {
            return Err(QrelsError::DuplicateStratum {
                topic,
                stratum: spec.id,
            });
        }
        entry.push(spec);
    }

    // Second pass: judgment records.
    let mut records: BTreeMap<TopicId, Vec<(ShotId, StratumId, bool)>> = BTreeMap::new();
    for (line_no, line) in content_lines(input) {
        if line.starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        let [topic, stratum, shot, relevance] = toks[..] else {
            return Err(malformed(line_no, "expected `topic stratum shot relevance`"));
        };
        let relevant = match relevance {
            "0" => false,
            "1" => true,
            other if other.parse::<i64>().is_ok() => {
                return Err(QrelsError::GradedValue {
                    line: line_no,
                    value: other.to_owned(),
                });
            }
            _ => return Err(malformed(line_no, "relevance must be 0 or 1")),
        };
        let topic = TopicId::from(topic);
        let stratum = StratumId::from(stratum);
        let declared = specs
            .get(&topic)
            .is_some_and(|ss| ss.iter().any(|s| s.id == stratum));
        if !declared {
            return Err(QrelsError::UnknownStratum {
                line: line_no,
                topic,
                stratum,
            });
        }
        records
            .entry(topic)
            .or_default()
            .push((ShotId::from(shot), stratum, relevant));
    }

    let mut topics = BTreeMap::new();
    for (topic, strata) in specs {
        let judgments = records.remove(&topic).unwrap_or_default();
        let tj = TopicJudgments::from_parts(&topic, strata, judgments)?;
        topics.insert(topic, tj);
    }
    Ok(StratifiedJudgments { topics })
}

/// Serializes judgments in canonical form: per topic, `#stratum` headers in
/// rank order followed by judgment lines in shot order.
pub fn write_judgments(judgments: &StratifiedJudgments) -> String {
    let mut out = String::new();
    for (topic, tj) in &judgments.topics {
        for s in &tj.strata {
            out.push_str(&format!(
                "#stratum {topic} {} {} {} {}\n",
                s.id, s.rank_lo, s.rank_hi, s.pool_size
            ));
        }
    }
    for (topic, tj) in &judgments.topics {
        for (shot, (idx, rel)) in &tj.judgments {
            out.push_str(&format!(
                "{topic} {} {shot} {}\n",
                tj.strata[*idx].id,
                if *rel { 1 } else { 0 }
            ));
        }
    }
    out
}
