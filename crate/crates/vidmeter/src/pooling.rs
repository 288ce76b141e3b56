//! Pool construction, stratified sampling, and judging statistics.
//!
//! Human assessment cannot cover every shot every run returned, so
//! judgments are collected over a *pool*: the union of all submitted
//! results, partitioned into rank strata that are then sampled at
//! different densities (e.g. every shot from ranks 1–250, one in nine
//! from ranks 251–1000). This module builds such pools, draws the random
//! samples reproducibly, and computes the per-topic judging statistics
//! table used to sanity-check a completed assessment round.
//!
//! Two rules keep pools well-defined when runs overlap:
//!
//! * a `(topic, shot)` pair enters the pool at most once, in the stratum
//!   covering its *best* (lowest) rank across all runs;
//! * sampling is keyed by `(seed, topic, stratum)`, so adding a topic or
//!   re-ordering the run list never changes what another topic draws.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::io::{RankedRun, StratifiedJudgments};
use crate::types::{ShotId, TopicId};

/// One stratum of a pooling plan: a rank band and its sampling rate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlanStratum {
    pub rank_lo: u32,
    pub rank_hi: u32,
    /// Fraction of the stratum to draw for judging, in `(0, 1]`.
    pub sampling_rate: f64,
}

/// A pooling plan: ascending, disjoint rank strata plus the sampling seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoolPlan {
    pub strata: Vec<PlanStratum>,
    pub seed: u64,
}

/// Ways a pooling request can fail.
#[derive(Debug, Error, PartialEq)]
pub enum PoolError {
    #[error("cannot build a pool from an empty run list")]
    EmptyRunList,
    #[error("invalid pooling plan: {reason}")]
    InvalidPlan { reason: String },
}

impl PoolPlan {
    pub fn new(strata: Vec<PlanStratum>, seed: u64) -> Result<Self, PoolError> {
        let plan = PoolPlan { strata, seed };
        plan.validate()?;
        Ok(plan)
    }

    pub fn validate(&self) -> Result<(), PoolError> {
        let invalid = |reason: &str| PoolError::InvalidPlan {
            reason: reason.to_owned(),
        };
        if self.strata.is_empty() {
            return Err(invalid("a plan needs at least one stratum"));
        }
        for s in &self.strata {
            if s.rank_lo == 0 || s.rank_lo > s.rank_hi {
                return Err(invalid("each stratum needs 1 <= rank_lo <= rank_hi"));
            }
            if !(s.sampling_rate > 0.0 && s.sampling_rate <= 1.0) {
                return Err(invalid("each sampling rate must be in (0, 1]"));
            }
        }
        for pair in self.strata.windows(2) {
            if pair[0].rank_hi >= pair[1].rank_lo {
                return Err(invalid("strata must be ascending and disjoint"));
            }
        }
        Ok(())
    }

    /// Index of the stratum covering `rank`, if any.
    fn stratum_for_rank(&self, rank: u32) -> Option<usize> {
        self.strata
            .iter()
            .position(|s| s.rank_lo <= rank && rank <= s.rank_hi)
    }

    /// The stratum label written to pool files: `s1`, `s2`, ... in band order.
    pub fn stratum_label(idx: usize) -> String {
        format!("s{}", idx + 1)
    }
}

/// A built (or sampled) pool: per topic, one shot set per plan stratum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Pool {
    stratum_count: usize,
    topics: BTreeMap<TopicId, Vec<BTreeSet<ShotId>>>,
}

impl Pool {
    pub fn topics(&self) -> impl Iterator<Item = (&TopicId, &[BTreeSet<ShotId>])> {
        self.topics.iter().map(|(t, s)| (t, s.as_slice()))
    }

    pub fn topic(&self, topic: &TopicId) -> Option<&[BTreeSet<ShotId>]> {
        self.topics.get(topic).map(Vec::as_slice)
    }

    pub fn stratum_count(&self) -> usize {
        self.stratum_count
    }

    /// Total pooled shots for one topic across all strata.
    pub fn topic_size(&self, topic: &TopicId) -> usize {
        self.topics
            .get(topic)
            .map_or(0, |strata| strata.iter().map(BTreeSet::len).sum())
    }

    /// Serializes the pool as `topic stratum shot` lines, sorted.
    pub fn to_file(&self) -> String {
        let mut out = String::new();
        for (topic, strata) in &self.topics {
            for (idx, members) in strata.iter().enumerate() {
                let label = PoolPlan::stratum_label(idx);
                for shot in members {
                    out.push_str(&format!("{topic} {label} {shot}\n"));
                }
            }
        }
        out
    }
}

/// Builds the judging pool for every topic the runs retrieved.
///
/// Each `(topic, shot)` pair is assigned to the stratum covering its best
/// rank across all runs; pairs whose best rank falls outside every stratum
/// are not pooled. The result is a set union, so run order is irrelevant.
pub fn build_pool(runs: &[RankedRun], plan: &PoolPlan) -> Result<Pool, PoolError> {
    if runs.is_empty() {
        return Err(PoolError::EmptyRunList);
    }
    plan.validate()?;

    let mut best_rank: HashMap<(&TopicId, &ShotId), u32> = HashMap::new();
    for run in runs {
        for (topic, entries) in run.topics() {
            for entry in entries {
                best_rank
                    .entry((topic, &entry.shot))
                    .and_modify(|r| *r = (*r).min(entry.rank))
                    .or_insert(entry.rank);
            }
        }
    }

    let mut topics: BTreeMap<TopicId, Vec<BTreeSet<ShotId>>> = BTreeMap::new();
    for ((topic, shot), rank) in best_rank {
        let Some(stratum) = plan.stratum_for_rank(rank) else {
            continue;
        };
        topics
            .entry(topic.clone())
            .or_insert_with(|| vec![BTreeSet::new(); plan.strata.len()])
            [stratum]
            .insert(shot.clone());
    }
    Ok(Pool {
        stratum_count: plan.strata.len(),
        topics,
    })
}

/// Number of shots to judge in a stratum of `pool_size` at `rate`.
///
/// The ceiling guarantees tiny strata still contribute at least one judged
/// shot. The epsilon nudge keeps binary float noise in `rate * size` (e.g.
/// `0.1 * 500 == 50.000000000000007`) from inflating the ceiling.
pub fn sample_size(rate: f64, pool_size: usize) -> usize {
    if pool_size == 0 {
        return 0;
    }
    let raw = (rate * pool_size as f64 - 1e-9).ceil() as usize;
    raw.clamp(1, pool_size)
}

/// Draws the judging sample from a built pool.
///
/// Each stratum of each topic is drawn independently with a ChaCha stream
/// keyed by `(plan.seed, topic, stratum)`, over the stratum's members in
/// sorted order — two properties that together make samples reproducible
/// and insensitive to how the pool was assembled or which other topics
/// exist. Sample sizes follow [`sample_size`].
pub fn sample_pool(pool: &Pool, plan: &PoolPlan) -> Result<Pool, PoolError> {
    plan.validate()?;
    if plan.strata.len() != pool.stratum_count {
        return Err(PoolError::InvalidPlan {
            reason: "plan stratum count does not match the pool".to_owned(),
        });
    }

    let mut topics: BTreeMap<TopicId, Vec<BTreeSet<ShotId>>> = BTreeMap::new();
    for (topic, strata) in &pool.topics {
        let mut sampled_strata = Vec::with_capacity(strata.len());
        for (idx, members) in strata.iter().enumerate() {
            let rate = plan.strata[idx].sampling_rate;
            let take = sample_size(rate, members.len());
            if take == members.len() {
                sampled_strata.push(members.clone());
                continue;
            }
            let ordered: Vec<&ShotId> = members.iter().collect();
            let mut rng = stratum_rng(plan.seed, topic, idx);
            let picked = rand::seq::index::sample(&mut rng, ordered.len(), take);
            sampled_strata.push(picked.iter().map(|i| ordered[i].clone()).collect());
        }
        topics.insert(topic.clone(), sampled_strata);
    }
    Ok(Pool {
        stratum_count: pool.stratum_count,
        topics,
    })
}

/// Derives the per-(topic, stratum) RNG from the plan seed. SHA-256 gives
/// a stable, well-mixed 32-byte ChaCha key; no global RNG state is shared
/// between strata, so sampling parallelizes and reorders freely.
fn stratum_rng(seed: u64, topic: &TopicId, stratum_idx: usize) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(topic.as_str().as_bytes());
    hasher.update([0u8]);
    hasher.update((stratum_idx as u64).to_le_bytes());
    ChaCha8Rng::from_seed(hasher.finalize().into())
}

/// One row of the per-topic judging statistics table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PoolStatsRow {
    pub topic: TopicId,
    pub total_submitted: u64,
    pub unique_submitted: u64,
    /// `100 * unique_submitted / total_submitted`, half-up at 2 decimals.
    pub pct_unique: f64,
    /// Deepest submission rank any stratum covered for this topic.
    pub max_depth_pooled: u32,
    pub number_judged: u64,
    /// `100 * number_judged / unique_submitted`, half-up at 2 decimals.
    pub pct_unique_judged: f64,
    pub number_relevant: u64,
    /// `100 * number_relevant / number_judged`, half-up at 2 decimals.
    pub pct_judged_relevant: f64,
}

impl PoolStatsRow {
    /// Computes a row from its integer columns; the three percentage
    /// columns are derived with exact rational rounding.
    pub fn from_counts(
        topic: TopicId,
        total_submitted: u64,
        unique_submitted: u64,
        max_depth_pooled: u32,
        number_judged: u64,
        number_relevant: u64,
    ) -> Self {
        PoolStatsRow {
            pct_unique: pct_half_up_2dp(unique_submitted, total_submitted),
            pct_unique_judged: pct_half_up_2dp(number_judged, unique_submitted),
            pct_judged_relevant: pct_half_up_2dp(number_relevant, number_judged),
            topic,
            total_submitted,
            unique_submitted,
            max_depth_pooled,
            number_judged,
            number_relevant,
        }
    }
}

/// `100 * num / den` rounded half-up to two decimals, computed in exact
/// integer arithmetic so boundary cases like `.005` never fall to float
/// noise. Returns 0 for an empty denominator.
pub fn pct_half_up_2dp(num: u64, den: u64) -> f64 {
    if den == 0 {
        return 0.0;
    }
    let scaled = num as u128 * 10_000;
    let mut q = scaled / den as u128;
    if 2 * (scaled % den as u128) >= den as u128 {
        q += 1;
    }
    q as f64 / 100.0
}

/// Computes the judging-statistics table over all runs and the collected
/// judgments: one row per judged topic, in topic order.
///
/// `number_judged` and `number_relevant` count judged shots that some run
/// actually submitted, so the table's column invariants
/// (`judged <= unique <= total`) hold even for mismatched inputs.
/// `max_depth_pooled` reports the deepest rank covered by the topic's
/// strata.
pub fn judging_stats(runs: &[RankedRun], judgments: &StratifiedJudgments) -> Vec<PoolStatsRow> {
    let mut rows = Vec::new();
    for (topic, tj) in judgments.topics() {
        let mut total: u64 = 0;
        let mut unique: BTreeSet<&ShotId> = BTreeSet::new();
        for run in runs {
            if let Some(entries) = run.topic_entries(topic) {
                total += entries.len() as u64;
                unique.extend(entries.iter().map(|e| &e.shot));
            }
        }
        let mut judged: u64 = 0;
        let mut relevant: u64 = 0;
        for (shot, _, rel) in tj.judgments() {
            if unique.contains(shot) {
                judged += 1;
                if rel {
                    relevant += 1;
                }
            }
        }
        let max_depth = tj.strata().iter().map(|s| s.rank_hi).max().unwrap_or(0);
        rows.push(PoolStatsRow::from_counts(
            topic.clone(),
            total,
            unique.len() as u64,
            max_depth,
            judged,
            relevant,
        ));
    }
    rows
}

/// CSV header for the judging statistics table.
pub const POOL_STATS_HEADER: &str = "Topic number,Total submitted,Unique submitted,total that were unique %,Max. result depth pooled,Number judged,unique that were judged %,Number relevant,judged that were relevant %";

/// Renders the statistics table as CSV with two-decimal percentages.
pub fn stats_csv(rows: &[PoolStatsRow]) -> String {
    let mut out = String::from(POOL_STATS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.2},{},{},{:.2},{},{:.2}\n",
            r.topic,
            r.total_submitted,
            r.unique_submitted,
            r.pct_unique,
            r.max_depth_pooled,
            r.number_judged,
            r.pct_unique_judged,
            r.number_relevant,
            r.pct_judged_relevant
        ));
    }
    out
}

/// Shots that would qualify for a second judging round: retrieved by at
/// least `min_runs` distinct runs at rank `max_rank` or better. Returned
/// per topic with the number of runs that retrieved each shot.
pub fn rejudge_candidates(
    runs: &[RankedRun],
    min_runs: usize,
    max_rank: u32,
) -> BTreeMap<TopicId, Vec<(ShotId, usize)>> {
    let mut counts: BTreeMap<TopicId, BTreeMap<ShotId, usize>> = BTreeMap::new();
    for run in runs {
        for (topic, entries) in run.topics() {
            for entry in entries.iter().filter(|e| e.rank <= max_rank) {
                *counts
                    .entry(topic.clone())
                    .or_default()
                    .entry(entry.shot.clone())
                    .or_insert(0) += 1;
            }
        }
    }
    counts
        .into_iter()
        .filter_map(|(topic, shots)| {
            let kept: Vec<(ShotId, usize)> = shots
                .into_iter()
                .filter(|(_, n)| *n >= min_runs)
                .collect();
            (!kept.is_empty()).then_some((topic, kept))
        })
        .collect()
}
