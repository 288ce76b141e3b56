//! Cross-system activity difficulty ranking.
//!
//! Given a complete matrix of scores (one per system × activity, lower is
//! better, e.g. the normalized area under the DET curve), each system
//! ranks the activities from easiest (rank 1, lowest score) to hardest.
//! An `AVG` column averages each activity's rank across systems, and each
//! system is summarized by the mean and spread of its raw scores.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::types::{ActivityId, SystemId};

/// Per-system activity ranks plus aggregate columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActivityRanking {
    /// All activities, ascending.
    pub activities: Vec<ActivityId>,
    /// All systems, ascending.
    pub systems: Vec<SystemId>,
    /// Per system: activity → rank (1 = easiest). Ties in score are
    /// broken by activity id ascending, so ranks are a permutation.
    pub ranks: BTreeMap<SystemId, BTreeMap<ActivityId, usize>>,
    /// Per activity: mean rank across systems (the `AVG` column).
    pub avg_rank: BTreeMap<ActivityId, f64>,
    /// Per system: (mean, population standard deviation) of its raw
    /// scores across activities.
    pub system_stats: BTreeMap<SystemId, (f64, f64)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum RankingError {
    /// A system is missing a score for an activity another system has.
    #[error("system {system} has no score for activity {activity}")]
    IncompleteMatrix {
        system: SystemId,
        activity: ActivityId,
    },
    /// There is nothing to rank.
    #[error("the score matrix is empty")]
    EmptyMatrix,
}

/// Ranks activities per system from a complete score matrix.
pub fn activity_ranking(
    scores: &BTreeMap<SystemId, BTreeMap<ActivityId, f64>>,
) -> Result<ActivityRanking, RankingError> {
    let activities: Vec<ActivityId> = scores
        .values()
        .flat_map(|m| m.keys())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .cloned()
        .collect();
    if scores.is_empty() || activities.is_empty() {
        return Err(RankingError::EmptyMatrix);
    }
    for (system, per_activity) in scores {
        for activity in &activities {
            if !per_activity.contains_key(activity) {
                return Err(RankingError::IncompleteMatrix {
                    system: system.clone(),
                    activity: activity.clone(),
                });
            }
        }
    }

    let systems: Vec<SystemId> = scores.keys().cloned().collect();
    let mut ranks: BTreeMap<SystemId, BTreeMap<ActivityId, usize>> = BTreeMap::new();
    let mut system_stats = BTreeMap::new();
    for (system, per_activity) in scores {
        let mut order: Vec<&ActivityId> = activities.iter().collect();
        order.sort_by(|a, b| {
            per_activity[*a]
                .partial_cmp(&per_activity[*b])
                .expect("finite scores")
                .then_with(|| a.cmp(b))
        });
        ranks.insert(
            system.clone(),
            order
                .into_iter()
                .enumerate()
                .map(|(idx, activity)| (activity.clone(), idx + 1))
                .collect(),
        );

        let values: Vec<f64> = per_activity.values().copied().collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        system_stats.insert(system.clone(), (mean, var.sqrt()));
    }

    let avg_rank = activities
        .iter()
        .map(|activity| {
            let total: usize = systems.iter().map(|s| ranks[s][activity]).sum();
            (activity.clone(), total as f64 / systems.len() as f64)
        })
        .collect();

    Ok(ActivityRanking {
        activities,
        systems,
        ranks,
        avg_rank,
        system_stats,
    })
}
