//! The direct-assessment rating log.
//!
//! Crowd workers rate how well a caption describes a video on a 0–100
//! slider. One line per rating event:
//!
//! ```text
//! worker17 sys_B vid044 72 0
//! worker17 HUMAN_2 vid044 95 0
//! worker17 sys_B vid101 64 1
//! ```
//!
//! Fields are `worker system video rating polluted`. The final flag marks
//! quality-control items: captions that were deliberately degraded before
//! being shown, so a diligent worker should rate them low. Ratings outside
//! `[0, 100]` are rejected.

use serde::Serialize;
use thiserror::Error;

use crate::types::{SystemId, VideoId, WorkerId};

use super::{content_lines, tokens};

/// One rating event.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DaRating {
    pub worker: WorkerId,
    pub system: SystemId,
    pub video: VideoId,
    /// Slider value in `[0, 100]`.
    pub rating: f64,
    /// True when the rated caption was a degraded quality-control item.
    pub polluted: bool,
}

/// A validated rating log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DaRatingLog {
    ratings: Vec<DaRating>,
}

/// Defects a rating log can be rejected for.
#[derive(Debug, Error, PartialEq)]
pub enum DaLogError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: rating {value} outside [0, 100]")]
    RatingOutOfRange { line: usize, value: f64 },
}

impl DaRatingLog {
    pub fn from_ratings(ratings: Vec<DaRating>) -> Result<Self, DaLogError> {
        for (pos, r) in ratings.iter().enumerate() {
            if !(0.0..=100.0).contains(&r.rating) || r.rating.is_nan() {
                return Err(DaLogError::RatingOutOfRange {
                    line: pos + 1,
                    value: r.rating,
                });
            }
        }
        let mut log = DaRatingLog { ratings };
        log.sort();
        Ok(log)
    }

    fn sort(&mut self) {
        self.ratings.sort_by(|a, b| {
            (&a.worker, &a.system, &a.video, a.polluted)
                .cmp(&(&b.worker, &b.system, &b.video, b.polluted))
                .then(a.rating.total_cmp(&b.rating))
        });
    }

    pub fn ratings(&self) -> &[DaRating] {
        &self.ratings
    }

    pub fn is_empty(&self) -> bool {
        self.ratings.is_empty()
    }

    /// A new log containing only ratings whose worker passes `keep`.
    pub fn filter_workers(&self, keep: impl Fn(&WorkerId) -> bool) -> DaRatingLog {
        DaRatingLog {
            ratings: self
                .ratings
                .iter()
                .filter(|r| keep(&r.worker))
                .cloned()
                .collect(),
        }
    }
}

/// Parses a rating log.
pub fn parse_da_log(input: &str) -> Result<DaRatingLog, DaLogError> {
    let malformed = |line: usize, reason: &str| DaLogError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    let mut ratings = Vec::new();
    for (line_no, line) in content_lines(input) {
        if line.starts_with('#') {
            continue;
        }
        let toks = tokens(line);
        let [worker, system, video, rating, polluted] = toks[..] else {
            return Err(malformed(
                line_no,
                "expected `worker system video rating polluted`",
            ));
        };
        let rating: f64 = rating
            .parse()
            .map_err(|_| malformed(line_no, "rating must be a number"))?;
        if !(0.0..=100.0).contains(&rating) || rating.is_nan() {
            return Err(DaLogError::RatingOutOfRange {
                line: line_no,
                value: rating,
            });
        }
        let polluted = match polluted {
            "0" => false,
            "1" => true,
            _ => return Err(malformed(line_no, "polluted flag must be 0 or 1")),
        };
        ratings.push(DaRating {
            worker: WorkerId::from(worker),
            system: SystemId::from(system),
            video: VideoId::from(video),
            rating,
            polluted,
        });
    }
    let mut log = DaRatingLog { ratings };
    log.sort();
    Ok(log)
}

/// Serializes a log canonically: lines sorted by worker, system, video.
pub fn write_da_log(log: &DaRatingLog) -> String {
    let mut out = String::new();
    for r in &log.ratings {
        out.push_str(&format!(
            "{} {} {} {} {}\n",
            r.worker,
            r.system,
            r.video,
            r.rating,
            if r.polluted { 1 } else { 0 }
        ));
    }
    out
}
