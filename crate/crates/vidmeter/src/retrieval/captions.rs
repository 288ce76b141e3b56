//! Mean inverted rank for the caption-matching task.
//!
//! Each video in a test set has exactly one correct caption; a system
//! submits, per video, the candidate captions ordered by estimated match
//! quality. The video contributes the reciprocal of the rank at which the
//! correct caption appears (rank 1 → 1.0, rank 4 → 0.25, not listed → 0).
//! Scores are averaged per set, and the overall score is the mean of the
//! per-set means.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::io::{CaptionGroundTruth, CaptionRankSubmission};
use crate::types::{SetId, VideoId};

/// Mean-inverted-rank scores for one submission.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MirReport {
    /// Mean of the per-video reciprocal ranks within each set.
    pub per_set: BTreeMap<SetId, f64>,
    /// Unweighted mean of the per-set means.
    pub overall: f64,
    /// Ground-truth videos scored, over all sets.
    pub video_count: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum MirError {
    /// A ground-truth video has no ranked caption list in the submission.
    #[error("set {set} video {video} has no ranked captions in the submission")]
    MissingVideo { set: SetId, video: VideoId },
}

/// Scores a caption-ranking submission against the ground truth.
///
/// Every ground-truth video must have a ranked list; extra sets or videos
/// in the submission are ignored. A list that omits the correct caption is
/// legal (the video scores 0), but a missing list is an error — silence
/// and a bottom rank are different failure modes.
pub fn mean_inverted_rank(
    submission: &CaptionRankSubmission,
    truth: &CaptionGroundTruth,
) -> Result<MirReport, MirError> {
    let mut per_set = BTreeMap::new();
    let mut video_count = 0usize;
    for (set, videos) in truth.sets() {
        let mut total = 0.0;
        for (video, correct) in videos {
            let Some(rank) = submission
                .set(set)
                .and_then(|ranked| ranked.get(video))
                .map(|captions| {
                    captions
                        .iter()
                        .position(|c| c == correct)
                        .map_or(0.0, |idx| 1.0 / (idx + 1) as f64)
                })
            else {
                return Err(MirError::MissingVideo {
                    set,
                    video: video.clone(),
                });
            };
            total += rank;
            video_count += 1;
        }
        per_set.insert(set, total / videos.len() as f64);
    }
    let overall = if per_set.is_empty() {
        0.0
    } else {
        per_set.values().sum::<f64>() / per_set.len() as f64
    };
    Ok(MirReport {
        per_set,
        overall,
        video_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_caption_ranks, parse_caption_truth};

    #[test]
    fn correct_caption_always_first_scores_one() {
        let truth = parse_caption_truth("A v1 c1\nA v2 c2\n").unwrap();
        let sub =
            parse_caption_ranks("A v1 1 c1\nA v1 2 c2\nA v2 1 c2\nA v2 2 c1\n").unwrap();
        let report = mean_inverted_rank(&sub, &truth).unwrap();
        assert_eq!(report.overall, 1.0);
        assert_eq!(report.per_set[&SetId::A], 1.0);
        assert_eq!(report.video_count, 2);
    }

    #[test]
    fn ranks_one_two_four_average_to_point_5833() {
        let truth = parse_caption_truth("A v1 c1\nA v2 c2\nA v3 c3\n").unwrap();
        let sub = parse_caption_ranks(concat!(
            "A v1 1 c1\n",
            "A v2 1 cx\nA v2 2 c2\n",
            "A v3 1 ca\nA v3 2 cb\nA v3 3 cc\nA v3 4 c3\n",
        ))
        .unwrap();
        let report = mean_inverted_rank(&sub, &truth).unwrap();
        assert!((report.overall - (1.0 + 0.5 + 0.25) / 3.0).abs() < 1e-12);
        assert!((report.overall - 0.5833).abs() < 1e-4);
    }

    #[test]
    fn absent_correct_caption_contributes_zero() {
        let truth = parse_caption_truth("B v1 c1\nB v2 c2\n").unwrap();
        let sub = parse_caption_ranks("B v1 1 c1\nB v2 1 cx\n").unwrap();
        let report = mean_inverted_rank(&sub, &truth).unwrap();
        assert!((report.per_set[&SetId::B] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn overall_is_the_mean_of_per_set_means() {
        let truth = parse_caption_truth("A v1 c1\nB w1 d1\nB w2 d2\n").unwrap();
        let sub =
            parse_caption_ranks("A v1 1 c1\nB w1 1 dx\nB w1 2 d1\nB w2 1 d2\n").unwrap();
        let report = mean_inverted_rank(&sub, &truth).unwrap();
        assert!((report.per_set[&SetId::A] - 1.0).abs() < 1e-12);
        assert!((report.per_set[&SetId::B] - 0.75).abs() < 1e-12);
        // Mean of set means, not of the three videos pooled (that would
        // be 0.8333).
        assert!((report.overall - 0.875).abs() < 1e-12);
        assert_eq!(report.video_count, 3);
    }

    #[test]
    fn ground_truth_video_without_a_list_is_an_error() {
        let truth = parse_caption_truth("A v1 c1\nA v2 c2\n").unwrap();
        let sub = parse_caption_ranks("A v1 1 c1\n").unwrap();
        assert_eq!(
            mean_inverted_rank(&sub, &truth).unwrap_err(),
            MirError::MissingVideo {
                set: SetId::A,
                video: VideoId::from("v2"),
            }
        );
    }
}
