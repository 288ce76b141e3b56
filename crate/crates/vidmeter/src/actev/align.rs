//! One-to-one alignment of system detections to reference instances.
//!
//! Two instances may be paired only when they lie in the same file and
//! their temporal intersection-over-union reaches the overlap threshold θ.
//! Among all one-to-one matchings obeying that predicate, the alignment
//! (1) maximizes the number of pairs and (2) among pair-count-maximal
//! matchings, maximizes the summed `IoU + confidence`, which makes the
//! outcome deterministic up to genuinely interchangeable instances.
//!
//! Both objectives are solved in one pass as an optimal bipartite
//! assignment: every admissible pair's weight is inflated by a constant
//! `BIG` exceeding any possible sum of secondary weights, so one extra
//! pair always outweighs any re-shuffling of the rest.

use pathfinding::matrix::Matrix;
use pathfinding::prelude::kuhn_munkres;

use ordered_float::OrderedFloat;
use serde::Serialize;
use thiserror::Error;

use crate::io::ActivityInstance;

/// One matched (reference, system) pair and the overlap that earned it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignedPair {
    pub reference: ActivityInstance,
    pub system: ActivityInstance,
    pub iou: f64,
}

/// The outcome of aligning one activity's instances at one threshold.
///
/// Every reference instance appears in exactly one of `pairs`/`misses`;
/// every system instance at or above the threshold appears in exactly one
/// of `pairs`/`false_alarms`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlignmentResult {
    pub pairs: Vec<AlignedPair>,
    pub misses: Vec<ActivityInstance>,
    pub false_alarms: Vec<ActivityInstance>,
    /// The confidence threshold the system set was filtered at.
    pub threshold: f64,
}

impl AlignmentResult {
    /// Correct detections.
    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Missed detections.
    pub fn n_misses(&self) -> usize {
        self.misses.len()
    }

    /// False alarms.
    pub fn n_false_alarms(&self) -> usize {
        self.false_alarms.len()
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum AlignError {
    /// Alignment is defined per activity; the inputs mixed labels.
    #[error("alignment got mixed activity labels: {first} and {second}")]
    MixedActivityLabels { first: String, second: String },
}

/// Temporal intersection-over-union of two closed frame spans.
///
/// Returns 0 when the instances lie in different files. Spans are closed,
/// so `[3, 6]` and `[6, 9]` intersect in one frame.
pub fn temporal_iou(a: &ActivityInstance, b: &ActivityInstance) -> f64 {
    if a.file != b.file {
        return 0.0;
    }
    let lo = a.begin.max(b.begin);
    let hi = a.end.min(b.end);
    if lo > hi {
        return 0.0;
    }
    let inter = hi - lo + 1;
    let union = a.frames() + b.frames() - inter;
    inter as f64 / union as f64
}

/// Aligns system instances with confidence ≥ `tau` to reference instances.
///
/// `theta` is the minimum temporal IoU for an admissible pair. System
/// instances without a recorded confidence are treated as confidence 0.
pub fn align_instances(
    reference: &[ActivityInstance],
    system: &[ActivityInstance],
    tau: f64,
    theta: f64,
) -> Result<AlignmentResult, AlignError> {
    check_single_label(reference.iter().chain(system.iter()))?;
    let sys: Vec<&ActivityInstance> = system
        .iter()
        .filter(|s| s.confidence.unwrap_or(0.0) >= tau)
        .collect();

    // Admissible edges and their secondary weights.
    let n_ref = reference.len();
    let n_sys = sys.len();
    let mut edges: Vec<Vec<Option<f64>>> = vec![vec![None; n_sys]; n_ref];
    let mut any_edge = false;
    for (i, r) in reference.iter().enumerate() {
        for (j, s) in sys.iter().enumerate() {
            let iou = temporal_iou(r, s);
            if iou >= theta {
                edges[i][j] = Some(iou + s.confidence.unwrap_or(0.0));
                any_edge = true;
            }
        }
    }

    let mut matched_ref: Vec<Option<usize>> = vec![None; n_ref];
    if any_edge {
        // Assignment weights: admissible pairs get BIG + weight so the
        // optimizer buys every possible pair before optimizing quality;
        // inadmissible cells get 0 and stand for "leave unmatched". BIG
        // exceeds any total of secondary weights (each < 2, at most
        // max(n_ref, n_sys) of them).
        let n = n_ref.max(n_sys);
        let big = 4.0 * (n as f64 + 1.0);
        let weight = |i: usize, j: usize| {
            OrderedFloat(edges[i][j].map_or(0.0, |w| big + w))
        };
        // kuhn_munkres wants rows ≤ columns; transpose when needed.
        if n_ref <= n_sys {
            let m = Matrix::from_fn(n_ref, n_sys, |(i, j)| weight(i, j));
            let (_, assignment) = kuhn_munkres(&m);
            for (i, j) in assignment.into_iter().enumerate() {
                if edges[i][j].is_some() {
                    matched_ref[i] = Some(j);
                }
            }
        } else {
            let m = Matrix::from_fn(n_sys, n_ref, |(j, i)| weight(i, j));
            let (_, assignment) = kuhn_munkres(&m);
            for (j, i) in assignment.into_iter().enumerate() {
                if edges[i][j].is_some() {
                    matched_ref[i] = Some(j);
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut misses = Vec::new();
    let mut matched_sys = vec![false; n_sys];
    for (i, r) in reference.iter().enumerate() {
        match matched_ref[i] {
            Some(j) => {
                matched_sys[j] = true;
                pairs.push(AlignedPair {
                    reference: r.clone(),
                    system: sys[j].clone(),
                    iou: temporal_iou(r, sys[j]),
                });
            }
            None => misses.push(r.clone()),
        }
    }
    let false_alarms = sys
        .iter()
        .enumerate()
        .filter(|(j, _)| !matched_sys[*j])
        .map(|(_, s)| (*s).clone())
        .collect();
    Ok(AlignmentResult {
        pairs,
        misses,
        false_alarms,
        threshold: tau,
    })
}

fn check_single_label<'a>(
    instances: impl Iterator<Item = &'a ActivityInstance>,
) -> Result<(), AlignError> {
    let mut first: Option<&str> = None;
    for inst in instances {
        match first {
            None => first = Some(inst.activity.as_str()),
            Some(label) if label != inst.activity.as_str() => {
                return Err(AlignError::MixedActivityLabels {
                    first: label.to_string(),
                    second: inst.activity.to_string(),
                });
            }
            Some(_) => {}
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{ActivityId, FileId};

    fn inst(file: &str, begin: u64, end: u64, conf: Option<f64>) -> ActivityInstance {
        ActivityInstance {
            activity: ActivityId::from("act"),
            file: FileId::from(file),
            begin,
            end,
            confidence: conf,
        }
    }

    #[test]
    fn iou_of_identical_spans_is_one() {
        let a = inst("f", 10, 20, None);
        let b = inst("f", 10, 20, Some(0.5));
        assert_eq!(temporal_iou(&a, &b), 1.0);
    }

    #[test]
    fn iou_counts_closed_interval_frames() {
        // [3,6] vs [6,9]: one shared frame, union 7 frames.
        let a = inst("f", 3, 6, None);
        let b = inst("f", 6, 9, None);
        assert!((temporal_iou(&a, &b) - 1.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn iou_across_files_is_zero() {
        let a = inst("f1", 1, 10, None);
        let b = inst("f2", 1, 10, None);
        assert_eq!(temporal_iou(&a, &b), 0.0);
    }

    #[test]
    fn perfect_system_pairs_everything() {
        let refs = vec![inst("f", 1, 10, None), inst("f", 20, 30, None)];
        let sys = vec![inst("f", 1, 10, Some(0.9)), inst("f", 20, 30, Some(0.8))];
        let a = align_instances(&refs, &sys, 0.0, 0.2).unwrap();
        assert_eq!(a.n_pairs(), 2);
        assert_eq!(a.n_misses(), 0);
        assert_eq!(a.n_false_alarms(), 0);
        assert!(a.pairs.iter().all(|p| p.iou == 1.0));
    }

    #[test]
    fn two_systems_on_distinct_refs_leave_one_miss() {
        let refs = vec![
            inst("f", 1, 10, None),
            inst("f", 20, 30, None),
            inst("f", 40, 50, None),
        ];
        let sys = vec![inst("f", 2, 9, Some(0.5)), inst("f", 41, 50, Some(0.5))];
        let a = align_instances(&refs, &sys, 0.0, 0.2).unwrap();
        assert_eq!(
            (a.n_pairs(), a.n_misses(), a.n_false_alarms()),
            (2, 1, 0)
        );
        assert_eq!(a.misses[0], refs[1]);
    }

    #[test]
    fn one_to_one_rule_makes_the_second_system_a_false_alarm() {
        let refs = vec![inst("f", 1, 10, None)];
        let sys = vec![inst("f", 1, 10, Some(0.9)), inst("f", 2, 10, Some(0.8))];
        let a = align_instances(&refs, &sys, 0.0, 0.2).unwrap();
        assert_eq!(
            (a.n_pairs(), a.n_misses(), a.n_false_alarms()),
            (1, 0, 1)
        );
    }

    #[test]
    fn pair_count_beats_pair_quality() {
        // s1 reaches both refs, s2 only r1, and the heaviest single edge
        // is r1–s1 (thanks to s1's confidence). Grabbing it greedily
        // would strand r2; the only two-pair matching is r1–s2 with
        // r2–s1, and pair count must win over edge weight.
        let refs = vec![inst("f", 1, 100, None), inst("f", 200, 300, None)];
        let sys = vec![
            inst("f", 50, 250, Some(0.9)), // s1: reaches both refs thinly
            inst("f", 1, 100, Some(0.1)),  // s2: perfect on r1 only
        ];
        let a = align_instances(&refs, &sys, 0.0, 0.2).unwrap();
        assert_eq!(
            (a.n_pairs(), a.n_misses(), a.n_false_alarms()),
            (2, 0, 0)
        );
        let by_ref: Vec<(&ActivityInstance, &ActivityInstance)> =
            a.pairs.iter().map(|p| (&p.reference, &p.system)).collect();
        assert!(by_ref.contains(&(&refs[0], &sys[1])));
        assert!(by_ref.contains(&(&refs[1], &sys[0])));
    }

    #[test]
    fn secondary_objective_prefers_higher_iou_plus_confidence() {
        // Both systems overlap the single ref; the matcher must keep the
        // one with the larger IoU + confidence and discard the other.
        let refs = vec![inst("f", 1, 100, None)];
        let sys = vec![inst("f", 1, 50, Some(0.2)), inst("f", 1, 90, Some(0.3))];
        let a = align_instances(&refs, &sys, 0.0, 0.2).unwrap();
        assert_eq!(a.n_pairs(), 1);
        assert_eq!(a.pairs[0].system, sys[1]);
        assert_eq!(a.false_alarms, vec![sys[0].clone()]);
    }

    #[test]
    fn threshold_filters_low_confidence_detections() {
        let refs = vec![inst("f", 1, 10, None)];
        let sys = vec![inst("f", 1, 10, Some(0.3))];
        let high = align_instances(&refs, &sys, 0.5, 0.2).unwrap();
        assert_eq!((high.n_pairs(), high.n_misses()), (0, 1));
        let low = align_instances(&refs, &sys, 0.3, 0.2).unwrap();
        assert_eq!((low.n_pairs(), low.n_misses()), (1, 0));
    }

    #[test]
    fn overlap_exactly_at_theta_is_admissible() {
        // [1,2] vs [2,5]: inter 1, union 5 → IoU = 0.2 exactly.
        let refs = vec![inst("f", 1, 2, None)];
        let sys = vec![inst("f", 2, 5, Some(0.5))];
        let a = align_instances(&refs, &sys, 0.0, 0.2).unwrap();
        assert_eq!(a.n_pairs(), 1);
    }

    #[test]
    fn empty_sides_degrade_to_all_misses_or_all_false_alarms() {
        let refs = vec![inst("f", 1, 10, None)];
        let sys = vec![inst("f", 1, 10, Some(0.9))];
        let no_sys = align_instances(&refs, &[], 0.0, 0.2).unwrap();
        assert_eq!((no_sys.n_pairs(), no_sys.n_misses()), (0, 1));
        let no_ref = align_instances(&[], &sys, 0.0, 0.2).unwrap();
        assert_eq!((no_ref.n_pairs(), no_ref.n_false_alarms()), (0, 1));
    }

    #[test]
    fn mixed_labels_are_rejected() {
        let refs = vec![inst("f", 1, 10, None)];
        let mut other = inst("f", 1, 10, Some(0.9));
        other.activity = ActivityId::from("other");
        let err = align_instances(&refs, &[other], 0.0, 0.2).unwrap_err();
        assert!(matches!(err, AlignError::MixedActivityLabels { .. }));
    }
}
