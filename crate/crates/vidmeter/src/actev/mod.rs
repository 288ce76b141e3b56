//! Activity-detection scoring.
//!
//! The pipeline runs per activity label:
//!
//! 1. [`align_instances`] pairs system detections with reference instances
//!    one-to-one (same file, temporal IoU at least θ), maximizing the pair
//!    count and, among count-maximal matchings, the summed IoU-plus-
//!    confidence — unmatched references are misses, unmatched detections
//!    false alarms;
//! 2. [`pmiss`], [`rate_fa`] and [`time_based_fa`] turn one alignment into
//!    the instance miss rate, false alarms per minute, and falsely
//!    detected time per non-reference frame;
//! 3. [`det_curve`] sweeps the confidence threshold to trace miss/false-
//!    alarm trade-off points, summarized by [`naudc`] (normalized partial
//!    area, 0 = perfect) and the fixed operating point [`pmiss_at_rfa`];
//! 4. [`activity_ranking`] aggregates a per-system, per-activity score
//!    matrix into difficulty rankings.

mod align;
mod det;
mod metrics;
mod ranking;

pub use align::{align_instances, temporal_iou, AlignError, AlignedPair, AlignmentResult};
pub use det::{det_curve, naudc, pmiss_at_rfa, DetCurve, DetPoint, FaAxis};
pub use metrics::{
    frame_histograms, pmiss, rate_fa, time_based_fa, FrameCountHistograms, MetricError,
};
pub use ranking::{activity_ranking, ActivityRanking, RankingError};
