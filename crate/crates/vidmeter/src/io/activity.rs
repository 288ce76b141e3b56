//! The temporal activity-instance format.
//!
//! Both reference annotations and system output use one grammar:
//!
//! ```text
//! #video VIRAT_S_0001 9000 30.0
//! reference Closing VIRAT_S_0001 120 270
//! system Closing VIRAT_S_0001 115 260 0.87
//! ```
//!
//! `#video file_id n_frames frame_rate` headers carry the collection
//! metadata every temporal measure needs (frame spans are validated
//! against `n_frames`, false-alarm rates divide by total duration).
//! Records are `kind activity file begin end [confidence]`: frame spans
//! are 1-based closed intervals, and the presence confidence is mandatory
//! for system output, forbidden for reference annotations. A file declares
//! its kind to the parser up front; mixed or contradicting records are
//! rejected so a reference can never smuggle in scores or vice versa.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::types::{ActivityId, FileId};

use super::{content_lines, tokens};

/// Whether an instance set is ground truth or system output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    Reference,
    System,
}

impl SetKind {
    fn token(self) -> &'static str {
        match self {
            SetKind::Reference => "reference",
            SetKind::System => "system",
        }
    }
}

/// Frame count and frame rate of one source video.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VideoMeta {
    pub frames: u64,
    pub frame_rate: f64,
}

impl VideoMeta {
    /// Video duration in minutes.
    pub fn minutes(&self) -> f64 {
        self.frames as f64 / self.frame_rate / 60.0
    }
}

/// One temporal activity instance: a closed frame span in one video.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActivityInstance {
    pub activity: ActivityId,
    pub file: FileId,
    /// First frame of the span (1-based, inclusive).
    pub begin: u64,
    /// Last frame of the span (inclusive).
    pub end: u64,
    /// Presence confidence in `[0, 1]`; system instances only.
    pub confidence: Option<f64>,
}

impl ActivityInstance {
    /// Span length in frames (closed interval, so at least 1).
    pub fn frames(&self) -> u64 {
        self.end - self.begin + 1
    }
}

/// A validated set of instances plus the video metadata they refer to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActivityInstanceSet {
    pub kind: SetKind,
    instances: Vec<ActivityInstance>,
    video_meta: BTreeMap<FileId, VideoMeta>,
}

/// Defects an activity-instance file can be rejected for.
#[derive(Debug, Error, PartialEq)]
pub enum ActivityFileError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: video {file} declared twice")]
    DuplicateVideoHeader { line: usize, file: FileId },
    #[error("line {line}: record kind does not match the declared {expected:?} set")]
    KindMismatch { line: usize, expected: SetKind },
    #[error("line {line}: video {file} has no `#video` header")]
    UnknownVideo { line: usize, file: FileId },
    #[error("line {line}: frame span outside 1..=n_frames (or begin > end)")]
    FrameSpanOutOfBounds { line: usize },
    #[error("line {line}: system instances require a presence confidence")]
    MissingConfidence { line: usize },
    #[error("line {line}: reference instances must not carry a confidence")]
    UnexpectedConfidence { line: usize },
    #[error("line {line}: confidence must be in [0, 1]")]
    ConfidenceOutOfRange { line: usize },
}

impl ActivityInstanceSet {
    /// Builds a set from parts, running the same validation as the parser.
    pub fn from_parts(
        kind: SetKind,
        instances: Vec<ActivityInstance>,
        video_meta: BTreeMap<FileId, VideoMeta>,
    ) -> Result<Self, ActivityFileError> {
        let set = ActivityInstanceSet {
            kind,
            instances,
            video_meta,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn instances(&self) -> &[ActivityInstance] {
        &self.instances
    }

    pub fn video_meta(&self) -> &BTreeMap<FileId, VideoMeta> {
        &self.video_meta
    }

    pub fn meta(&self, file: &FileId) -> Option<&VideoMeta> {
        self.video_meta.get(file)
    }

    /// Distinct activity labels present, sorted.
    pub fn activities(&self) -> Vec<&ActivityId> {
        let mut labels: Vec<&ActivityId> = self.instances.iter().map(|i| &i.activity).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Instances carrying one activity label, in file order.
    pub fn instances_for<'a>(&'a self, activity: &'a ActivityId) -> Vec<&'a ActivityInstance> {
        self.instances
            .iter()
            .filter(move |i| &i.activity == activity)
            .collect()
    }

    /// Total duration of all declared videos, in minutes.
    pub fn total_minutes(&self) -> f64 {
        self.video_meta.values().map(VideoMeta::minutes).sum()
    }

    /// Re-checks every invariant; `line` in errors refers to the instance's
    /// position in the list (1-based) when no file context exists.
    pub fn validate(&self) -> Result<(), ActivityFileError> {
        for (pos, inst) in self.instances.iter().enumerate() {
            let line = pos + 1;
            let meta = self
                .video_meta
                .get(&inst.file)
                .ok_or_else(|| ActivityFileError::UnknownVideo {
                    line,
                    file: inst.file.clone(),
                })?;
            if inst.begin == 0 || inst.begin > inst.end || inst.end > meta.frames {
                return Err(ActivityFileError::FrameSpanOutOfBounds { line });
            }
            match (self.kind, inst.confidence) {
                (SetKind::System, None) => {
                    return Err(ActivityFileError::MissingConfidence { line })
                }
                (SetKind::Reference, Some(_)) => {
                    return Err(ActivityFileError::UnexpectedConfidence { line })
                }
                (SetKind::System, Some(c)) if !(0.0..=1.0).contains(&c) || c.is_nan() => {
                    return Err(ActivityFileError::ConfidenceOutOfRange { line })
                }
                _ => {}
            }
        }
        for (file, meta) in &self.video_meta {
            if meta.frames == 0 || !(meta.frame_rate.is_finite() && meta.frame_rate > 0.0) {
                return Err(ActivityFileError::MalformedLine {
                    line: 0,
                    reason: format!("video {file} needs positive frames and frame rate"),
                });
            }
        }
        Ok(())
    }
}

/// Parses an activity-instance file declared to be of `kind`.
pub fn parse_activity_set(
    input: &str,
    kind: SetKind,
) -> Result<ActivityInstanceSet, ActivityFileError> {
    let malformed = |line: usize, reason: &str| ActivityFileError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    let mut video_meta: BTreeMap<FileId, VideoMeta> = BTreeMap::new();
    let mut instances: Vec<ActivityInstance> = Vec::new();

    for (line_no, line) in content_lines(input) {
        if let Some(rest) = line.strip_prefix('#') {
            let toks = tokens(rest);
            if toks.first().copied() != Some("video") {
                continue; // ordinary comment
            }
            let [_, file, frames, rate] = toks[..] else {
                return Err(malformed(
                    line_no,
                    "expected `#video file_id n_frames frame_rate`",
                ));
            };
            let frames: u64 = frames
                .parse()
                .map_err(|_| malformed(line_no, "n_frames must be a positive integer"))?;
            let frame_rate: f64 = rate
                .parse()
                .map_err(|_| malformed(line_no, "frame_rate must be a number"))?;
            if frames == 0 || !(frame_rate.is_finite() && frame_rate > 0.0) {
                return Err(malformed(line_no, "frames and frame rate must be positive"));
            }
            let file = FileId::from(file);
            if video_meta
                .insert(file.clone(), VideoMeta { frames, frame_rate })
                .is_some()
            {
                return Err(ActivityFileError::DuplicateVideoHeader {
                    line: line_no,
                    file,
                });
            }
            continue;
        }

        let toks = tokens(line);
        let (record_kind, activity, file, begin, end, conf) = match toks[..] {
            [k, a, f, b, e] => (k, a, f, b, e, None),
            [k, a, f, b, e, c] => (k, a, f, b, e, Some(c)),
            _ => {
                return Err(malformed(
                    line_no,
                    "expected `kind activity file begin end [confidence]`",
                ))
            }
        };
        match (record_kind, kind) {
            ("reference", SetKind::Reference) | ("system", SetKind::System) => {}
            ("reference", _) | ("system", _) => {
                return Err(ActivityFileError::KindMismatch {
                    line: line_no,
                    expected: kind,
                });
            }
            _ => return Err(malformed(line_no, "kind must be `reference` or `system`")),
        }
        let begin: u64 = begin
            .parse()
            .map_err(|_| malformed(line_no, "begin frame must be a positive integer"))?;
        let end: u64 = end
            .parse()
            .map_err(|_| malformed(line_no, "end frame must be a positive integer"))?;
        let file = FileId::from(file);
        let meta = video_meta
            .get(&file)
            .ok_or_else(|| ActivityFileError::UnknownVideo {
                line: line_no,
                file: file.clone(),
            })?;
        if begin == 0 || begin > end || end > meta.frames {
            return Err(ActivityFileError::FrameSpanOutOfBounds { line: line_no });
        }
        let confidence = match (kind, conf) {
            (SetKind::System, Some(c)) => {
                let c: f64 = c
                    .parse()
                    .map_err(|_| malformed(line_no, "confidence must be a number"))?;
                if !(0.0..=1.0).contains(&c) || c.is_nan() {
                    return Err(ActivityFileError::ConfidenceOutOfRange { line: line_no });
                }
                Some(c)
            }
            (SetKind::System, None) => {
                return Err(ActivityFileError::MissingConfidence { line: line_no })
            }
            (SetKind::Reference, Some(_)) => {
                return Err(ActivityFileError::UnexpectedConfidence { line: line_no })
            }
            (SetKind::Reference, None) => None,
        };
        instances.push(ActivityInstance {
            activity: ActivityId::from(activity),
            file,
            begin,
            end,
            confidence,
        });
    }

    instances.sort_by(|a, b| {
        (&a.activity, &a.file, a.begin, a.end)
            .cmp(&(&b.activity, &b.file, b.begin, b.end))
            .then(
                a.confidence
                    .unwrap_or(0.0)
                    .total_cmp(&b.confidence.unwrap_or(0.0)),
            )
    });
    Ok(ActivityInstanceSet {
        kind,
        instances,
        video_meta,
    })
}

/// Serializes an instance set canonically: `#video` headers sorted by file,
/// then records sorted by activity, file and span.
pub fn write_activity_set(set: &ActivityInstanceSet) -> String {
    let mut out = String::new();
    for (file, meta) in &set.video_meta {
        out.push_str(&format!(
            "#video {file} {} {}\n",
            meta.frames, meta.frame_rate
        ));
    }
    for inst in &set.instances {
        match inst.confidence {
            Some(c) => out.push_str(&format!(
                "{} {} {} {} {} {c}\n",
                set.kind.token(),
                inst.activity,
                inst.file,
                inst.begin,
                inst.end
            )),
            None => out.push_str(&format!(
                "{} {} {} {} {}\n",
                set.kind.token(),
                inst.activity,
                inst.file,
                inst.begin,
                inst.end
            )),
        }
    }
    out
}
