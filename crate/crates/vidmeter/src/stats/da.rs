//! Direct-Assessment rating standardization and worker quality control.
//!
//! Crowd workers rate captions 0–100. Two defenses keep the scoreboard
//! honest:
//!
//! 1. **QC** ([`da_worker_qc`]) — some rated captions are deliberately
//!    degraded ("polluted"). A worker who does not rate their clean
//!    captions strictly higher than their polluted ones on average fails
//!    and should be filtered out before scoring.
//! 2. **Standardization** ([`da_standardize`]) — each rating is turned
//!    into a z-score against that worker's own mean and population
//!    standard deviation, cancelling out generous or harsh personal
//!    scales.
//!
//! Polluted ratings calibrate the worker's scale but are never aggregated
//! into system scores. System aggregation is micro-averaged per caption
//! (one system × video pair), then averaged over videos.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::io::DaRatingLog;
use crate::types::{SystemId, VideoId, WorkerId};

#[derive(Debug, Error, PartialEq)]
pub enum DaError {
    #[error("the rating log is empty")]
    EmptyLog,
}

/// One worker's quality-control outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkerQc {
    pub mean_unpolluted: Option<f64>,
    pub mean_polluted: Option<f64>,
    /// Pass iff the unpolluted mean strictly exceeds the polluted one.
    pub passed: bool,
    /// The worker saw no polluted captions, so the check could not run;
    /// such workers pass by default but are flagged.
    pub unverifiable: bool,
}

/// Checks every worker's ability to rank clean captions above polluted
/// ones.
pub fn da_worker_qc(log: &DaRatingLog) -> Result<BTreeMap<WorkerId, WorkerQc>, DaError> {
    if log.is_empty() {
        return Err(DaError::EmptyLog);
    }
    let mut sums: BTreeMap<WorkerId, (f64, u32, f64, u32)> = BTreeMap::new();
    for r in log.ratings() {
        let entry = sums.entry(r.worker.clone()).or_insert((0.0, 0, 0.0, 0));
        if r.polluted {
            entry.2 += r.rating;
            entry.3 += 1;
        } else {
            entry.0 += r.rating;
            entry.1 += 1;
        }
    }
    Ok(sums
        .into_iter()
        .map(|(worker, (clean_sum, clean_n, bad_sum, bad_n))| {
            let mean_unpolluted = (clean_n > 0).then(|| clean_sum / f64::from(clean_n));
            let mean_polluted = (bad_n > 0).then(|| bad_sum / f64::from(bad_n));
            let (passed, unverifiable) = match (mean_unpolluted, mean_polluted) {
                (Some(clean), Some(bad)) => (clean > bad, false),
                // No polluted items: nothing to test against.
                (Some(_), None) => (true, true),
                // Only polluted items: no clean ratings to vouch for.
                (None, _) => (false, false),
            };
            (
                worker,
                WorkerQc {
                    mean_unpolluted,
                    mean_polluted,
                    passed,
                    unverifiable,
                },
            )
        })
        .collect())
}

/// One worker's rating-scale statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkerStats {
    /// Mean over all the worker's ratings, polluted included.
    pub mean: f64,
    /// Population standard deviation (divisor N) of the same.
    pub stddev: f64,
    pub n_ratings: usize,
    /// Fewer than 2 ratings or zero spread: no usable scale, so the
    /// worker's ratings are excluded from system scores.
    pub degenerate: bool,
}

/// One system's aggregated scoreboard row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SystemDaScore {
    /// Mean of per-caption raw averages on the 0–100 scale.
    pub raw_mean: f64,
    /// Mean of per-caption z-score averages.
    pub z_mean: f64,
    /// Unpolluted ratings aggregated.
    pub n_ratings: usize,
    /// Captions (videos) aggregated.
    pub n_videos: usize,
}

/// Raw and standardized system scores plus the worker table behind them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DaScoreboard {
    pub systems: BTreeMap<SystemId, SystemDaScore>,
    pub workers: BTreeMap<WorkerId, WorkerStats>,
}

/// Standardizes ratings per worker and aggregates them per system.
///
/// Expects a log already filtered to QC-passing workers (see
/// [`da_worker_qc`]); it does not re-run QC. Workers whose ratings carry
/// no spread are marked degenerate and contribute nothing to the
/// scoreboard.
pub fn da_standardize(log: &DaRatingLog) -> Result<DaScoreboard, DaError> {
    if log.is_empty() {
        return Err(DaError::EmptyLog);
    }

    let mut per_worker: BTreeMap<WorkerId, Vec<f64>> = BTreeMap::new();
    for r in log.ratings() {
        per_worker
            .entry(r.worker.clone())
            .or_default()
            .push(r.rating);
    }
    let workers: BTreeMap<WorkerId, WorkerStats> = per_worker
        .into_iter()
        .map(|(worker, ratings)| {
            let n = ratings.len();
            let mean = ratings.iter().sum::<f64>() / n as f64;
            let var = ratings.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n as f64;
            let stddev = var.sqrt();
            (
                worker,
                WorkerStats {
                    mean,
                    stddev,
                    n_ratings: n,
                    degenerate: n < 2 || stddev == 0.0,
                },
            )
        })
        .collect();

    // Micro-average per caption = (system, video) pair…
    let mut captions: BTreeMap<(SystemId, VideoId), (f64, f64, usize)> = BTreeMap::new();
    for r in log.ratings() {
        if r.polluted {
            continue; // calibration rows never reach the scoreboard
        }
        let stats = &workers[&r.worker];
        if stats.degenerate {
            continue;
        }
        let z = (r.rating - stats.mean) / stats.stddev;
        let entry = captions
            .entry((r.system.clone(), r.video.clone()))
            .or_insert((0.0, 0.0, 0));
        entry.0 += r.rating;
        entry.1 += z;
        entry.2 += 1;
    }

    // …then average captions per system.
    let mut systems: BTreeMap<SystemId, (f64, f64, usize, usize)> = BTreeMap::new();
    for ((system, _video), (raw_sum, z_sum, n)) in captions {
        let entry = systems.entry(system).or_insert((0.0, 0.0, 0, 0));
        entry.0 += raw_sum / n as f64;
        entry.1 += z_sum / n as f64;
        entry.2 += n;
        entry.3 += 1;
    }
    let systems = systems
        .into_iter()
        .map(|(system, (raw_total, z_total, n_ratings, n_videos))| {
            (
                system,
                SystemDaScore {
                    raw_mean: raw_total / n_videos as f64,
                    z_mean: z_total / n_videos as f64,
                    n_ratings,
                    n_videos,
                },
            )
        })
        .collect();

    Ok(DaScoreboard { systems, workers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_da_log;

    #[test]
    fn qc_passes_workers_who_downrate_polluted_captions() {
        let log = parse_da_log("w1 s1 v1 80 0\nw1 s1 v2 20 1\n").unwrap();
        let qc = da_worker_qc(&log).unwrap();
        let w = &qc[&WorkerId::from("w1")];
        assert!(w.passed);
        assert!(!w.unverifiable);
        assert_eq!(w.mean_unpolluted, Some(80.0));
        assert_eq!(w.mean_polluted, Some(20.0));
    }

    #[test]
    fn qc_equal_means_fail_the_strict_inequality() {
        let log = parse_da_log("w1 s1 v1 50 0\nw1 s1 v2 50 1\n").unwrap();
        assert!(!da_worker_qc(&log).unwrap()[&WorkerId::from("w1")].passed);
    }

    #[test]
    fn qc_four_rating_hand_case() {
        // Clean mean (70+50)/2 = 60, polluted mean (55+75)/2 = 65 → fail.
        let log = parse_da_log(concat!(
            "w1 s1 v1 70 0\n",
            "w1 s1 v2 50 0\n",
            "w1 s2 v1 55 1\n",
            "w1 s2 v2 75 1\n",
        ))
        .unwrap();
        let w = &da_worker_qc(&log).unwrap()[&WorkerId::from("w1")];
        assert!(!w.passed);
        assert_eq!(w.mean_unpolluted, Some(60.0));
        assert_eq!(w.mean_polluted, Some(65.0));
    }

    #[test]
    fn qc_without_polluted_items_passes_but_is_flagged() {
        let log = parse_da_log("w1 s1 v1 80 0\n").unwrap();
        let w = &da_worker_qc(&log).unwrap()[&WorkerId::from("w1")];
        assert!(w.passed);
        assert!(w.unverifiable);
    }

    #[test]
    fn qc_with_only_polluted_items_fails() {
        let log = parse_da_log("w1 s1 v1 80 1\n").unwrap();
        assert!(!da_worker_qc(&log).unwrap()[&WorkerId::from("w1")].passed);
    }

    #[test]
    fn empty_log_is_rejected() {
        let log = parse_da_log("").unwrap();
        assert_eq!(da_worker_qc(&log).unwrap_err(), DaError::EmptyLog);
        assert_eq!(da_standardize(&log).unwrap_err(), DaError::EmptyLog);
    }

    #[test]
    fn two_point_worker_standardizes_to_unit_z() {
        // Worker mean 50, population stddev 10: the 60 rating is z = 1.
        let log = parse_da_log("w1 sA v1 40 0\nw1 sB v2 60 0\n").unwrap();
        let board = da_standardize(&log).unwrap();
        let w = &board.workers[&WorkerId::from("w1")];
        assert_eq!((w.mean, w.stddev), (50.0, 10.0));
        assert!(!w.degenerate);
        assert_eq!(board.systems[&SystemId::from("sB")].z_mean, 1.0);
        assert_eq!(board.systems[&SystemId::from("sA")].z_mean, -1.0);
    }

    #[test]
    fn two_worker_log_matches_the_hand_computed_oracle() {
        let log = parse_da_log(concat!(
            "w1 sA v1 30 0\n",
            "w1 sA v2 50 0\n",
            "w1 sA v3 40 0\n", // w1: mean 40
            "w2 sA v3 70 0\n",
            "w2 sA v4 90 0\n",
            "w2 sA v5 80 0\n", // w2: mean 80
        ))
        .unwrap();
        let board = da_standardize(&log).unwrap();
        // Both workers have population std s = sqrt(200/3). Per-caption
        // z: v1 = -10/s, v2 = 10/s, v3 = (0 + -10/s)/2 (two raters),
        // v4 = 10/s, v5 = 0. System mean over the 5 videos:
        let s = (200.0f64 / 3.0).sqrt();
        let expected = ((-10.0 / s) + (10.0 / s) + (-5.0 / s) + (10.0 / s) + 0.0) / 5.0;
        let got = board.systems[&SystemId::from("sA")].z_mean;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn degenerate_workers_are_flagged_and_excluded() {
        let log = parse_da_log(concat!(
            "w1 sA v1 50 0\n",
            "w1 sA v2 50 0\n", // zero spread
            "w2 sA v1 40 0\n",
            "w2 sA v2 60 0\n",
        ))
        .unwrap();
        let board = da_standardize(&log).unwrap();
        assert!(board.workers[&WorkerId::from("w1")].degenerate);
        assert!(!board.workers[&WorkerId::from("w2")].degenerate);
        // Only w2's ratings reach the scoreboard.
        let sys = &board.systems[&SystemId::from("sA")];
        assert_eq!(sys.n_ratings, 2);
        assert_eq!(sys.raw_mean, 50.0);
    }

    #[test]
    fn polluted_rows_calibrate_the_worker_but_do_not_score() {
        let log = parse_da_log(concat!(
            "w1 sA v1 60 0\n",
            "w1 junk v2 20 1\n", // calibration only
            "w1 sA v3 40 0\n",
        ))
        .unwrap();
        let board = da_standardize(&log).unwrap();
        // Worker stats include the polluted 20: mean 40, std over 3.
        let w = &board.workers[&WorkerId::from("w1")];
        assert_eq!(w.mean, 40.0);
        assert_eq!(w.n_ratings, 3);
        // But no `junk` system appears, and sA aggregates 2 ratings.
        assert!(!board.systems.contains_key(&SystemId::from("junk")));
        assert_eq!(board.systems[&SystemId::from("sA")].n_ratings, 2);
    }

    #[test]
    fn captions_micro_average_before_the_video_average() {
        // Caption (sA, v1) has two ratings, caption (sA, v2) one. Equal
        // caption weight means v1's pair averages first.
        let log = parse_da_log(concat!(
            "w1 sA v1 40 0\n",
            "w1 sA v2 60 0\n",
            "w2 sA v1 80 0\n",
            "w2 sA v9 20 0\n",
        ))
        .unwrap();
        let board = da_standardize(&log).unwrap();
        let sys = &board.systems[&SystemId::from("sA")];
        // Raw: v1 → (40+80)/2 = 60, v2 → 60, v9 → 20; mean = 140/3.
        assert!((sys.raw_mean - 140.0 / 3.0).abs() < 1e-12);
        assert_eq!(sys.n_videos, 3);
        assert_eq!(sys.n_ratings, 4);
    }
}
