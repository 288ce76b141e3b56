//! The novelty measure and cross-run overlap bookkeeping.
//!
//! Mainstream retrieval measures reward consensus: a relevant shot that
//! every system returns contributes to every score. The novelty measure
//! inverts that. Each relevant `(topic, shot)` pair is weighted by how few
//! runs found it,
//!
//! ```text
//! weight = 1 - N / M
//! ```
//!
//! with `N` the number of runs in the comparison set retrieving the pair
//! and `M` the comparison set size, and a run is paid the summed weight of
//! the relevant pairs *only it* retrieved (`N == 1`). With 47 runs, a
//! uniquely retrieved relevant shot is worth `1 - 1/47 ≈ 0.9787`.
//!
//! When the scored run is a declared novelty run, the rest of its team's
//! conventional runs are dropped from the comparison set first, so a team
//! cannot lose credit merely because its own sibling submissions share a
//! video-analysis backbone.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::io::{RankedRun, StratifiedJudgments};
use crate::types::{RunTag, ShotId, TeamId, TopicId};

/// One weight-table row: how widely one relevant shot was retrieved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoveltyWeightEntry {
    pub topic: TopicId,
    pub shot: ShotId,
    /// Runs (over all submissions) retrieving the pair.
    pub retrieved_by: usize,
    /// Total submitted runs.
    pub total_runs: usize,
    /// `1 - retrieved_by / total_runs`.
    pub weight: f64,
}

/// One run's novelty outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoveltyRunScore {
    /// Mean of the per-topic sums over every evaluated topic.
    pub mean: f64,
    /// Per topic: summed weight of relevant pairs only this run retrieved.
    pub per_topic: BTreeMap<TopicId, f64>,
    /// Size of the comparison set the run was scored against.
    pub comparison_size: usize,
}

/// Novelty scores for every run plus the shared weight table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoveltyReport {
    /// Weights of all judged-relevant retrieved pairs, over all runs.
    pub weight_table: Vec<NoveltyWeightEntry>,
    pub per_run: BTreeMap<RunTag, NoveltyRunScore>,
}

#[derive(Debug, Error, PartialEq)]
pub enum NoveltyError {
    #[error("novelty scoring needs a non-empty run list")]
    EmptyComparisonSet,
}

/// Scores every run under the novelty measure.
///
/// The weight table always reflects the full run list; the per-run
/// comparison set differs only for declared novelty runs, which are scored
/// with their own team's conventional runs removed.
pub fn compute_novelty(
    runs: &[RankedRun],
    judgments: &StratifiedJudgments,
) -> Result<NoveltyReport, NoveltyError> {
    if runs.is_empty() {
        return Err(NoveltyError::EmptyComparisonSet);
    }
    let m_all = runs.len();

    // How many runs retrieved each (topic, shot) pair.
    let mut count_all: HashMap<(&TopicId, &ShotId), u32> = HashMap::new();
    for run in runs {
        for pair in run.topic_shot_pairs() {
            *count_all.entry(pair).or_insert(0) += 1;
        }
    }

    // Per team with a declared novelty run: counts over that team's
    // conventional runs, to be subtracted when scoring the novelty run.
    let novelty_teams: HashSet<TeamId> = runs
        .iter()
        .filter(|r| r.novelty_run)
        .map(|r| r.team_or_tag())
        .collect();
    let mut team_common_counts: HashMap<TeamId, HashMap<(&TopicId, &ShotId), u32>> =
        HashMap::new();
    let mut team_common_sizes: HashMap<TeamId, usize> = HashMap::new();
    for run in runs.iter().filter(|r| !r.novelty_run) {
        let team = run.team_or_tag();
        if !novelty_teams.contains(&team) {
            continue;
        }
        *team_common_sizes.entry(team.clone()).or_insert(0) += 1;
        let counts = team_common_counts.entry(team).or_default();
        for pair in run.topic_shot_pairs() {
            *counts.entry(pair).or_insert(0) += 1;
        }
    }

    let mut weight_table = Vec::new();
    for (topic, tj) in judgments.topics() {
        for shot in tj.relevant_shots() {
            if let Some(&n) = count_all.get(&(topic, shot)) {
                weight_table.push(NoveltyWeightEntry {
                    topic: topic.clone(),
                    shot: shot.clone(),
                    retrieved_by: n as usize,
                    total_runs: m_all,
                    weight: 1.0 - n as f64 / m_all as f64,
                });
            }
        }
    }

    let mut per_run = BTreeMap::new();
    for run in runs {
        let (removed_counts, removed_size) = if run.novelty_run {
            let team = run.team_or_tag();
            (
                team_common_counts.get(&team),
                team_common_sizes.get(&team).copied().unwrap_or(0),
            )
        } else {
            (None, 0)
        };
        let m = m_all - removed_size;
        let unique_weight = 1.0 - 1.0 / m as f64;

        let mut per_topic = BTreeMap::new();
        let evaluated: Vec<&TopicId> = judgments.topic_ids().collect();
        for topic in &evaluated {
            let tj = judgments.topic(topic).expect("topic listed");
            let mut sum = 0.0;
            if let Some(entries) = run.topic_entries(topic) {
                for entry in entries {
                    if !tj.is_judged_relevant(&entry.shot) {
                        continue;
                    }
                    let n_all = count_all[&(*topic, &entry.shot)];
                    let n = n_all
                        - removed_counts
                            .and_then(|c| c.get(&(*topic, &entry.shot)))
                            .copied()
                            .unwrap_or(0);
                    if n == 1 {
                        sum += unique_weight;
                    }
                }
            }
            per_topic.insert((*topic).clone(), sum);
        }
        let mean = if per_topic.is_empty() {
            0.0
        } else {
            per_topic.values().sum::<f64>() / per_topic.len() as f64
        };
        per_run.insert(
            run.run_tag.clone(),
            NoveltyRunScore {
                mean,
                per_topic,
                comparison_size: m,
            },
        );
    }

    Ok(NoveltyReport {
        weight_table,
        per_run,
    })
}

/// Per-topic uniqueness of the *relevant* shots, at team granularity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniqueOverlapReport {
    /// Per topic: (relevant pairs exactly one team retrieved,
    /// relevant pairs two or more teams retrieved).
    pub per_topic: BTreeMap<TopicId, (u64, u64)>,
    /// Per team: relevant pairs only that team retrieved, over all topics.
    pub per_team: BTreeMap<TeamId, u64>,
}

/// Splits every retrieved relevant pair into team-unique vs. shared.
///
/// Granularity is deliberately the team, not the run: two sibling runs
/// retrieving the same shot still make it unique. Relevant shots no run
/// retrieved appear in neither column.
pub fn unique_overlap_analysis(
    runs: &[RankedRun],
    judgments: &StratifiedJudgments,
) -> UniqueOverlapReport {
    // For each pair: the first team that retrieved it, or None once a
    // second distinct team shows up.
    let mut first_team: HashMap<(&TopicId, &ShotId), Option<TeamId>> = HashMap::new();
    for run in runs {
        let team = run.team_or_tag();
        for pair in run.topic_shot_pairs() {
            first_team
                .entry(pair)
                .and_modify(|slot| {
                    if slot.as_ref() != Some(&team) {
                        *slot = None;
                    }
                })
                .or_insert_with(|| Some(team.clone()));
        }
    }

    let mut per_topic = BTreeMap::new();
    let mut per_team: BTreeMap<TeamId, u64> = BTreeMap::new();
    for (topic, tj) in judgments.topics() {
        let mut unique = 0u64;
        let mut overlapping = 0u64;
        for shot in tj.relevant_shots() {
            match first_team.get(&(topic, shot)) {
                Some(Some(team)) => {
                    unique += 1;
                    *per_team.entry(team.clone()).or_insert(0) += 1;
                }
                Some(None) => overlapping += 1,
                None => {} // relevant but never retrieved
            }
        }
        per_topic.insert(topic.clone(), (unique, overlapping));
    }
    UniqueOverlapReport {
        per_topic,
        per_team,
    }
}

/// Percentage overlap between two runs' retrieved `(topic, shot)` pairs:
/// `100 * |A ∩ B| / |A ∪ B|`, or 0 when both runs are empty.
pub fn run_overlap_pct(a: &RankedRun, b: &RankedRun) -> f64 {
    let set_a: HashSet<(&TopicId, &ShotId)> = a.topic_shot_pairs().collect();
    let set_b: HashSet<(&TopicId, &ShotId)> = b.topic_shot_pairs().collect();
    let (small, large) = if set_a.len() <= set_b.len() {
        (&set_a, &set_b)
    } else {
        (&set_b, &set_a)
    };
    let inter = small.iter().filter(|p| large.contains(*p)).count();
    let union = set_a.len() + set_b.len() - inter;
    if union == 0 {
        return 0.0;
    }
    100.0 * inter as f64 / union as f64
}

/// All pairwise overlaps plus their summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairwiseOverlap {
    /// `(tag_a, tag_b, pct)` for every unordered pair, tags sorted.
    pub pairs: Vec<(RunTag, RunTag, f64)>,
    pub mean_pct: f64,
    pub min_pct: f64,
    pub max_pct: f64,
}

/// Computes the overlap of every unordered run pair. Returns `None` with
/// fewer than two runs. Pairs are ordered by tag so the report is stable
/// regardless of input order; the pair computations run in parallel.
pub fn pairwise_overlap(runs: &[RankedRun]) -> Option<PairwiseOverlap> {
    if runs.len() < 2 {
        return None;
    }
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by(|&i, &j| runs[i].run_tag.cmp(&runs[j].run_tag));

    let sets: Vec<HashSet<(&TopicId, &ShotId)>> = order
        .iter()
        .map(|&i| runs[i].topic_shot_pairs().collect())
        .collect();

    let mut index_pairs = Vec::new();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            index_pairs.push((i, j));
        }
    }
    let pairs: Vec<(RunTag, RunTag, f64)> = index_pairs
        .par_iter()
        .map(|&(i, j)| {
            let (small, large) = if sets[i].len() <= sets[j].len() {
                (&sets[i], &sets[j])
            } else {
                (&sets[j], &sets[i])
            };
            let inter = small.iter().filter(|p| large.contains(*p)).count();
            let union = sets[i].len() + sets[j].len() - inter;
            let pct = if union == 0 {
                0.0
            } else {
                100.0 * inter as f64 / union as f64
            };
            (
                runs[order[i]].run_tag.clone(),
                runs[order[j]].run_tag.clone(),
                pct,
            )
        })
        .collect();

    let mean_pct = pairs.iter().map(|(_, _, p)| p).sum::<f64>() / pairs.len() as f64;
    let min_pct = pairs.iter().map(|(_, _, p)| *p).fold(f64::INFINITY, f64::min);
    let max_pct = pairs
        .iter()
        .map(|(_, _, p)| *p)
        .fold(f64::NEG_INFINITY, f64::max);
    Some(PairwiseOverlap {
        pairs,
        mean_pct,
        min_pct,
        max_pct,
    })
}
