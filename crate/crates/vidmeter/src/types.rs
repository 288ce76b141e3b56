//! Identifier newtypes and small enums shared across the crate.
//!
//! Every identifier that appears in a submission or judgment file (topic
//! numbers, shot ids, activity labels, worker ids, ...) is an opaque token:
//! we never parse structure out of it, we only compare, hash, and sort it.
//! Wrapping each kind in its own newtype keeps the signatures honest —
//! a `ShotId` cannot be passed where a `TopicId` is expected.

use std::fmt;

use serde::Serialize;

macro_rules! token_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Self {
                Self(value.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(value: &str) -> Self {
                Self(value.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(value: String) -> Self {
                Self(value)
            }
        }
    };
}

token_type!(
    /// A query/topic identifier, e.g. `561` or `9249`.
    TopicId
);
token_type!(
    /// A video shot identifier returned by a retrieval run.
    ShotId
);
token_type!(
    /// A sampling stratum identifier inside a judgment file.
    StratumId
);
token_type!(
    /// The tag a submitted run carries on every line.
    RunTag
);
token_type!(
    /// The team a run is attributed to (defaults to the run tag).
    TeamId
);
token_type!(
    /// A source video file in an activity-detection collection.
    FileId
);
token_type!(
    /// An activity label, e.g. `Closing` or `vehicle_turning_left`.
    ActivityId
);
token_type!(
    /// A video identifier in a caption-matching ground truth.
    VideoId
);
token_type!(
    /// A candidate caption identifier in a caption-matching run.
    CaptionId
);
token_type!(
    /// A crowd worker identifier in a direct-assessment rating log.
    WorkerId
);
token_type!(
    /// A captioning system identifier (includes `HUMAN_*` baselines).
    SystemId
);

/// Which benchmark task a ranked-list submission belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// Ad-hoc search: free-text topics, stratified pooled judgments.
    Adhoc,
    /// Instance search: person/action topics, fully judged pools.
    Instance,
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskKind::Adhoc => f.write_str("adhoc"),
            TaskKind::Instance => f.write_str("instance"),
        }
    }
}

/// The training-data category a run declares.
///
/// Categories beyond the four named ones occasionally appear in older
/// submissions; they parse as [`TrainingType::Other`] only when written
/// literally as `other`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum TrainingType {
    A,
    D,
    E,
    F,
    #[default]
    Other,
}

impl TrainingType {
    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "A" => Some(TrainingType::A),
            "D" => Some(TrainingType::D),
            "E" => Some(TrainingType::E),
            "F" => Some(TrainingType::F),
            "other" => Some(TrainingType::Other),
            _ => None,
        }
    }
}

impl fmt::Display for TrainingType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainingType::A => f.write_str("A"),
            TrainingType::D => f.write_str("D"),
            TrainingType::E => f.write_str("E"),
            TrainingType::F => f.write_str("F"),
            TrainingType::Other => f.write_str("other"),
        }
    }
}

/// One of the five caption-matching subsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SetId {
    A,
    B,
    C,
    D,
    E,
}

impl SetId {
    pub const ALL: [SetId; 5] = [SetId::A, SetId::B, SetId::C, SetId::D, SetId::E];

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "A" => Some(SetId::A),
            "B" => Some(SetId::B),
            "C" => Some(SetId::C),
            "D" => Some(SetId::D),
            "E" => Some(SetId::E),
            _ => None,
        }
    }
}

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetId::A => f.write_str("A"),
            SetId::B => f.write_str("B"),
            SetId::C => f.write_str("C"),
            SetId::D => f.write_str("D"),
            SetId::E => f.write_str("E"),
        }
    }
}
