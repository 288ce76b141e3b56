//! The caption-matching formats.
//!
//! In the matching-and-ranking subtask, systems receive five subsets
//! (`A`..`E`) of videos and, for each video, return every candidate
//! caption of the subset ordered by how well it fits. A submission line
//! is `set video rank caption`:
//!
//! ```text
//! A vid001 1 cap_17
//! A vid001 2 cap_03
//! B vid044 1 cap_90
//! ```
//!
//! Ranks must be exactly `1..=n` per `(set, video)` and a caption may
//! appear only once per video. The ground truth pairs each video with its
//! single correct caption, one `set video caption` line per video.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::types::{CaptionId, SetId, VideoId};

use super::{content_lines, tokens};

/// A validated matching-and-ranking submission: per set, per video, the
/// candidate captions in rank order (index 0 is rank 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaptionRankSubmission {
    sets: BTreeMap<SetId, BTreeMap<VideoId, Vec<CaptionId>>>,
}

/// The correct caption for every video of every set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaptionGroundTruth {
    sets: BTreeMap<SetId, BTreeMap<VideoId, CaptionId>>,
}

/// Defects a caption file can be rejected for.
#[derive(Debug, Error, PartialEq)]
pub enum CaptionFileError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("set {set}, video {video}: caption {caption} ranked twice")]
    DuplicateCaption {
        set: SetId,
        video: VideoId,
        caption: CaptionId,
    },
    #[error("set {set}, video {video}: ranks are not exactly 1..=n")]
    NonContiguousRanks { set: SetId, video: VideoId },
    #[error("set {set}: video {video} listed twice in the ground truth")]
    DuplicateVideo { set: SetId, video: VideoId },
}

impl CaptionRankSubmission {
    /// Builds a submission from rank-ordered caption lists, enforcing
    /// uniqueness (contiguity is implied by list position).
    pub fn from_parts(
        sets: BTreeMap<SetId, BTreeMap<VideoId, Vec<CaptionId>>>,
    ) -> Result<Self, CaptionFileError> {
        for (set, videos) in &sets {
            for (video, captions) in videos {
                let mut seen = std::collections::HashSet::new();
                for caption in captions {
                    if !seen.insert(caption) {
                        return Err(CaptionFileError::DuplicateCaption {
                            set: *set,
                            video: video.clone(),
                            caption: caption.clone(),
                        });
                    }
                }
            }
        }
        Ok(CaptionRankSubmission { sets })
    }

    pub fn set(&self, set: SetId) -> Option<&BTreeMap<VideoId, Vec<CaptionId>>> {
        self.sets.get(&set)
    }

    pub fn sets(&self) -> impl Iterator<Item = (SetId, &BTreeMap<VideoId, Vec<CaptionId>>)> {
        self.sets.iter().map(|(s, v)| (*s, v))
    }

    /// 1-based rank of `caption` for `video` in `set`, if present.
    pub fn rank_of(&self, set: SetId, video: &VideoId, caption: &CaptionId) -> Option<usize> {
        self.sets
            .get(&set)?
            .get(video)?
            .iter()
            .position(|c| c == caption)
            .map(|idx| idx + 1)
    }
}

impl CaptionGroundTruth {
    pub fn from_parts(sets: BTreeMap<SetId, BTreeMap<VideoId, CaptionId>>) -> Self {
        CaptionGroundTruth { sets }
    }

    pub fn set(&self, set: SetId) -> Option<&BTreeMap<VideoId, CaptionId>> {
        self.sets.get(&set)
    }

    pub fn sets(&self) -> impl Iterator<Item = (SetId, &BTreeMap<VideoId, CaptionId>)> {
        self.sets.iter().map(|(s, v)| (*s, v))
    }
}

/// Parses a matching-and-ranking submission.
pub fn parse_caption_ranks(input: &str) -> Result<CaptionRankSubmission, CaptionFileError> {
    let malformed = |line: usize, reason: &str| CaptionFileError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    let mut raw: BTreeMap<SetId, BTreeMap<VideoId, Vec<(u32, CaptionId)>>> = BTreeMap::new();
    for (line_no, line) in content_lines(input) {
        if line.starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        let [set, video, rank, caption] = toks[..] else {
            return Err(malformed(line_no, "expected `set video rank caption`"));
        };
        let set = SetId::parse(set)
            .ok_or_else(|| malformed(line_no, "set must be one of A, B, C, D, E"))?;
        let rank: u32 = rank
            .parse()
            .map_err(|_| malformed(line_no, "rank must be a positive integer"))?;
        if rank == 0 {
            return Err(malformed(line_no, "rank must be a positive integer"));
        }
        raw.entry(set)
            .or_default()
            .entry(VideoId::from(video))
            .or_default()
            .push((rank, CaptionId::from(caption)));
    }

    let mut sets: BTreeMap<SetId, BTreeMap<VideoId, Vec<CaptionId>>> = BTreeMap::new();
    for (set, videos) in raw {
        let mut out_videos = BTreeMap::new();
        for (video, mut ranked) in videos {
            ranked.sort_by_key(|(rank, _)| *rank);
            let contiguous = ranked
                .iter()
                .enumerate()
                .all(|(idx, (rank, _))| *rank as usize == idx + 1);
            if !contiguous {
                return Err(CaptionFileError::NonContiguousRanks { set, video });
            }
            out_videos.insert(video, ranked.into_iter().map(|(_, c)| c).collect());
        }
        sets.insert(set, out_videos);
    }
    CaptionRankSubmission::from_parts(sets)
}

/// Parses a caption ground-truth file of `set video caption` lines.
pub fn parse_caption_truth(input: &str) -> Result<CaptionGroundTruth, CaptionFileError> {
    let malformed = |line: usize, reason: &str| CaptionFileError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    let mut sets: BTreeMap<SetId, BTreeMap<VideoId, CaptionId>> = BTreeMap::new();
    for (line_no, line) in content_lines(input) {
        if line.starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        let [set, video, caption] = toks[..] else {
            return Err(malformed(line_no, "expected `set video caption`"));
        };
        let set = SetId::parse(set)
            .ok_or_else(|| malformed(line_no, "set must be one of A, B, C, D, E"))?;
        let video = VideoId::from(video);
        if sets
            .entry(set)
            .or_default()
            .insert(video.clone(), CaptionId::from(caption))
            .is_some()
        {
            return Err(CaptionFileError::DuplicateVideo { set, video });
        }
    }
    Ok(CaptionGroundTruth { sets })
}

/// Serializes a submission canonically: lines sorted by set, video, rank.
pub fn write_caption_ranks(submission: &CaptionRankSubmission) -> String {
    let mut out = String::new();
    for (set, videos) in &submission.sets {
        for (video, captions) in videos {
            for (idx, caption) in captions.iter().enumerate() {
                out.push_str(&format!("{set} {video} {} {caption}\n", idx + 1));
            }
        }
    }
    out
}

/// Serializes a ground truth canonically: lines sorted by set, video.
pub fn write_caption_truth(truth: &CaptionGroundTruth) -> String {
    let mut out = String::new();
    for (set, videos) in &truth.sets {
        for (video, caption) in videos {
            out.push_str(&format!("{set} {video} {caption}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SUB: &str = "\
A v1 1 c2
A v1 2 c1
A v2 1 c1
B v9 1 c7
";

    #[test]
    fn parses_and_ranks() {
        let sub = parse_caption_ranks(SUB).unwrap();
        assert_eq!(
            sub.rank_of(SetId::A, &VideoId::from("v1"), &CaptionId::from("c1")),
            Some(2)
        );
        assert_eq!(
            sub.rank_of(SetId::A, &VideoId::from("v2"), &CaptionId::from("c9")),
            None
        );
    }

    #[test]
    fn rejects_duplicate_caption_per_video() {
        let text = "A v1 1 c1\nA v1 2 c1\n";
        assert!(matches!(
            parse_caption_ranks(text),
            Err(CaptionFileError::DuplicateCaption { .. })
        ));
    }

    #[test]
    fn rejects_rank_gaps() {
        let text = "A v1 1 c1\nA v1 3 c2\n";
        assert!(matches!(
            parse_caption_ranks(text),
            Err(CaptionFileError::NonContiguousRanks { .. })
        ));
    }

    #[test]
    fn rejects_unknown_set() {
        let text = "Z v1 1 c1\n";
        assert!(matches!(
            parse_caption_ranks(text),
            Err(CaptionFileError::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn truth_rejects_duplicate_video() {
        let text = "A v1 c1\nA v1 c2\n";
        assert!(matches!(
            parse_caption_truth(text),
            Err(CaptionFileError::DuplicateVideo { .. })
        ));
    }

    #[test]
    fn canonical_text_round_trips_byte_for_byte() {
        let sub = parse_caption_ranks(SUB).unwrap();
        assert_eq!(write_caption_ranks(&sub), SUB);
        let truth_text = "A v1 c2\nB v9 c7\n";
        let truth = parse_caption_truth(truth_text).unwrap();
        assert_eq!(write_caption_truth(&truth), truth_text);
    }
}
