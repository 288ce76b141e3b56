//! Instance- and time-based detection error rates.
//!
//! From one alignment, `pmiss` and `rate_fa` count whole instances. The
//! time-based false alarm `Tfa` instead measures *when* the system was
//! wrong: per frame, the system may claim at most as many concurrent
//! instances as the reference without penalty; every claimed instance
//! beyond that adds one frame of falsely detected time. The total is
//! normalized by the pooled count of frames the activity does not occur
//! in at all.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::align::AlignmentResult;
use crate::io::{ActivityInstance, ActivityInstanceSet};
use crate::types::{ActivityId, FileId};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    /// The reference contains no instance of the activity.
    #[error("no reference instances to score against")]
    NoTrueInstances,
    /// The evaluated corpus has no duration.
    #[error("total video duration is zero")]
    ZeroDuration,
    /// The reference covers every frame, leaving nothing to false-alarm
    /// on.
    #[error("no non-reference duration: reference instances cover every frame")]
    NoNonReferenceDuration,
    /// A system instance refers to a video absent from the reference
    /// video table.
    #[error("system instance refers to unknown video {0}")]
    UnknownFile(FileId),
}

/// Fraction of reference instances the system missed: `misses / n_true`.
pub fn pmiss(alignment: &AlignmentResult, n_true: usize) -> Result<f64, MetricError> {
    if n_true == 0 {
        return Err(MetricError::NoTrueInstances);
    }
    Ok(alignment.n_misses() as f64 / n_true as f64)
}

/// Instance-based false alarms per minute of evaluated video.
pub fn rate_fa(alignment: &AlignmentResult, video_minutes: f64) -> Result<f64, MetricError> {
    if video_minutes <= 0.0 {
        return Err(MetricError::ZeroDuration);
    }
    Ok(alignment.n_false_alarms() as f64 / video_minutes)
}

/// Per-file, per-frame counts of concurrent reference and system
/// instances for one activity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameCountHistograms {
    /// Per file: (reference counts, system counts), one entry per frame.
    per_file: BTreeMap<FileId, (Vec<u32>, Vec<u32>)>,
    /// Pooled count of frames with zero reference instances, over every
    /// file in the corpus (files without any instance of the activity
    /// contribute their whole duration).
    non_reference_frames: u64,
}

impl FrameCountHistograms {
    pub fn per_file(&self) -> &BTreeMap<FileId, (Vec<u32>, Vec<u32>)> {
        &self.per_file
    }

    pub fn non_reference_frames(&self) -> u64 {
        self.non_reference_frames
    }
}

/// Paints per-frame instance counts for one activity.
///
/// The reference set's video table defines the corpus: every declared
/// file gets a histogram (all-zero when the activity never occurs there),
/// and system instances must stay within that corpus. Only system
/// instances with confidence ≥ `tau` are painted.
pub fn frame_histograms(
    reference: &ActivityInstanceSet,
    system: &ActivityInstanceSet,
    activity: &ActivityId,
    tau: f64,
) -> Result<FrameCountHistograms, MetricError> {
    let mut per_file: BTreeMap<FileId, (Vec<u32>, Vec<u32>)> = reference
        .video_meta()
        .iter()
        .map(|(file, meta)| {
            (
                file.clone(),
                (vec![0; meta.frames as usize], vec![0; meta.frames as usize]),
            )
        })
        .collect();

    let paint = |hist: &mut Vec<u32>, inst: &ActivityInstance| {
        for frame in &mut hist[(inst.begin - 1) as usize..inst.end as usize] {
            *frame += 1;
        }
    };
    for inst in reference.instances_for(activity) {
        let (r, _) = per_file.get_mut(&inst.file).expect("validated file");
        paint(r, inst);
    }
    for inst in system.instances_for(activity) {
        if inst.confidence.unwrap_or(0.0) < tau {
            continue;
        }
        let (_, s) = per_file
            .get_mut(&inst.file)
            .ok_or_else(|| MetricError::UnknownFile(inst.file.clone()))?;
        paint(s, inst);
    }

    let non_reference_frames = per_file
        .values()
        .map(|(r, _)| r.iter().filter(|&&c| c == 0).count() as u64)
        .sum();
    Ok(FrameCountHistograms {
        per_file,
        non_reference_frames,
    })
}

/// Time-based false alarm: falsely claimed frame count per non-reference
/// frame,
///
/// ```text
/// Tfa = (1/NR) · Σ_frames max(0, S′ − R′)
/// ```
///
/// summed over every file, with `NR` pooled across files.
pub fn time_based_fa(histograms: &FrameCountHistograms) -> Result<f64, MetricError> {
    if histograms.non_reference_frames == 0 {
        return Err(MetricError::NoNonReferenceDuration);
    }
    let excess: u64 = histograms
        .per_file
        .values()
        .flat_map(|(r, s)| r.iter().zip(s).map(|(&r, &s)| u64::from(s.saturating_sub(r))))
        .sum();
    Ok(excess as f64 / histograms.non_reference_frames as f64)
}
