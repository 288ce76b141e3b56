//! Detection error trade-off curves and their scalar summaries.
//!
//! A DET curve traces how a system trades misses for false alarms as its
//! confidence threshold τ drops: each distinct submitted confidence is an
//! operating point, re-aligned from scratch at that τ. Lowering τ only
//! adds detections, so Pmiss never increases and the false-alarm value
//! never decreases along the sweep.
//!
//! Two scalars summarize a curve: [`naudc`], the normalized partial area
//! under Pmiss over the false-alarm range `[0, a]` (0 is perfect, 1 is
//! hopeless), and [`pmiss_at_rfa`], the interpolated miss rate at a fixed
//! false-alarm rate.

use serde::Serialize;

use super::align::align_instances;
use super::metrics::{frame_histograms, pmiss, rate_fa, time_based_fa, MetricError};
use crate::io::ActivityInstanceSet;
use crate::types::ActivityId;

/// Which false-alarm measure the x axis carries.
#[derive(Clone, Copy, Debug, Eq, PartialEq, Serialize)]
pub enum FaAxis {
    /// Falsely claimed time per non-reference frame (Tfa).
    TimeBased,
    /// Instance false alarms per minute (RFA).
    RateBased,
}

/// One operating point of a DET curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetPoint {
    /// The confidence threshold producing this point.
    pub tau: f64,
    /// False-alarm value on the configured axis.
    pub fa: f64,
    pub pmiss: f64,
}

/// Operating points sorted by false-alarm value ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetCurve {
    pub points: Vec<DetPoint>,
    pub fa_axis: FaAxis,
}

/// Sweeps the confidence threshold and scores one activity at every
/// distinct submitted confidence.
///
/// A system that never fires on the activity yields the degenerate curve
/// — a single point with `pmiss = 1` at `fa = 0` — rather than an error,
/// so batch scoring over many activities keeps going.
pub fn det_curve(
    reference: &ActivityInstanceSet,
    system: &ActivityInstanceSet,
    activity: &ActivityId,
    theta: f64,
    fa_axis: FaAxis,
) -> Result<DetCurve, MetricError> {
    let ref_instances: Vec<_> = reference
        .instances_for(activity)
        .into_iter()
        .cloned()
        .collect();
    let n_true = ref_instances.len();
    if n_true == 0 {
        return Err(MetricError::NoTrueInstances);
    }
    let sys_instances: Vec<_> = system
        .instances_for(activity)
        .into_iter()
        .cloned()
        .collect();
    if sys_instances.is_empty() {
        return Ok(DetCurve {
            points: vec![DetPoint {
                tau: f64::INFINITY,
                fa: 0.0,
                pmiss: 1.0,
            }],
            fa_axis,
        });
    }

    let mut thresholds: Vec<f64> = sys_instances
        .iter()
        .map(|i| i.confidence.unwrap_or(0.0))
        .collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).expect("finite confidences"));
    thresholds.dedup();

    let total_minutes = reference.total_minutes();
    let mut points = Vec::with_capacity(thresholds.len());
    for tau in thresholds {
        let alignment = align_instances(&ref_instances, &sys_instances, tau, theta)
            .expect("single label by construction");
        let fa = match fa_axis {
            FaAxis::TimeBased => {
                let h = frame_histograms(reference, system, activity, tau)?;
                time_based_fa(&h)?
            }
            FaAxis::RateBased => rate_fa(&alignment, total_minutes)?,
        };
        points.push(DetPoint {
            tau,
            fa,
            pmiss: pmiss(&alignment, n_true)?,
        });
    }
    // The sweep yields non-decreasing fa already; sorting makes the
    // ascending-fa invariant structural rather than incidental.
    points.sort_by(|a, b| {
        a.fa.partial_cmp(&b.fa)
            .expect("finite fa")
            .then(b.tau.partial_cmp(&a.tau).expect("finite tau"))
    });
    Ok(DetCurve { points, fa_axis })
}

/// Best achievable `pmiss` at each distinct fa, sorted by fa.
fn achievable_frontier(curve: &DetCurve) -> Vec<(f64, f64)> {
    let mut frontier: Vec<(f64, f64)> = Vec::new();
    for p in &curve.points {
        match frontier.last_mut() {
            Some((fa, pm)) if *fa == p.fa => *pm = pm.min(p.pmiss),
            _ => frontier.push((p.fa, p.pmiss)),
        }
    }
    frontier
}

/// Normalized partial area under the DET curve over fa ∈ `[0, a]`.
///
/// The curve is read as stepwise-constant from each operating point
/// rightward; before the first achievable point the system effectively
/// misses everything (`pmiss = 1`), and the last point extends to the
/// limit. The area is divided by `a`, so 0 is perfect and 1 is the
/// never-fires system.
pub fn naudc(curve: &DetCurve, a: f64) -> f64 {
    assert!(a > 0.0, "integration limit must be positive, got {a}");
    let frontier = achievable_frontier(curve);
    let mut area = 0.0;
    let mut x = 0.0;
    let mut value = 1.0; // left of the first operating point
    for &(fa, pm) in &frontier {
        if fa >= a {
            break;
        }
        if fa > x {
            area += (fa - x) * value;
            x = fa;
        }
        value = pm;
    }
    area += (a - x) * value;
    // Every integrated pmiss lies in [0, 1], so the exact ratio does too;
    // clamp away the last-ulp drift float summation can leave.
    (area / a).clamp(0.0, 1.0)
}

/// `pmiss` linearly interpolated at the false-alarm value `target`.
///
/// Below the first achievable point the system cannot operate, so the
/// reading is 1.0; beyond the last point the final miss rate extends.
pub fn pmiss_at_rfa(curve: &DetCurve, target: f64) -> f64 {
    let frontier = achievable_frontier(curve);
    let Some(&(first_fa, _)) = frontier.first() else {
        return 1.0;
    };
    if target < first_fa {
        return 1.0;
    }
    let &(last_fa, last_pm) = frontier.last().expect("nonempty frontier");
    if target >= last_fa {
        return last_pm;
    }
    let idx = frontier.partition_point(|&(fa, _)| fa <= target);
    let (x0, y0) = frontier[idx - 1];
    let (x1, y1) = frontier[idx];
    y0 + (y1 - y0) * (target - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_activity_set, ActivityFileError, SetKind};

    fn act() -> ActivityId {
        ActivityId::from("act")
    }

    fn parse_ref(input: &str) -> Result<ActivityInstanceSet, ActivityFileError> {
        parse_activity_set(input, SetKind::Reference)
    }

    fn parse_sys(input: &str) -> Result<ActivityInstanceSet, ActivityFileError> {
        parse_activity_set(input, SetKind::System)
    }

    #[test]
    fn perfect_system_scores_zero_everywhere() {
        let reference =
            parse_ref("#video f 600 30\nreference act f 100 200\n").unwrap();
        let system =
            parse_sys("#video f 600 30\nsystem act f 100 200 0.9\n").unwrap();
        let curve = det_curve(&reference, &system, &act(), 0.2, FaAxis::TimeBased).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!(curve.points[0].fa, 0.0);
        assert_eq!(curve.points[0].pmiss, 0.0);
        assert_eq!(naudc(&curve, 0.2), 0.0);
    }

    #[test]
    fn absent_system_yields_the_degenerate_curve() {
        let reference =
            parse_ref("#video f 600 30\nreference act f 100 200\n").unwrap();
        let system = parse_sys("#video f 600 30\n").unwrap();
        let curve = det_curve(&reference, &system, &act(), 0.2, FaAxis::TimeBased).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert_eq!((curve.points[0].fa, curve.points[0].pmiss), (0.0, 1.0));
        assert_eq!(naudc(&curve, 0.2), 1.0);
    }

    #[test]
    fn no_reference_instances_is_an_error() {
        let reference = parse_ref("#video f 600 30\n").unwrap();
        let system =
            parse_sys("#video f 600 30\nsystem act f 1 2 0.9\n").unwrap();
        assert_eq!(
            det_curve(&reference, &system, &act(), 0.2, FaAxis::TimeBased).unwrap_err(),
            MetricError::NoTrueInstances
        );
    }

    #[test]
    fn two_instance_toy_case_matches_threshold_enumeration() {
        // Reference: two instances. System: a perfect hit at 0.9 and a
        // pure false alarm at 0.4.
        //   τ = 0.9 → 1 pair, 1 miss, 0 FA → pmiss 0.5, RFA 0
        //   τ = 0.4 → 1 pair, 1 miss, 1 FA → pmiss 0.5, RFA 1/3 (180 s)
        let reference = parse_ref(
            "#video f 5400 30\nreference act f 100 200\nreference act f 1000 1100\n",
        )
        .unwrap();
        let system = parse_sys(
            "#video f 5400 30\nsystem act f 100 200 0.9\nsystem act f 3000 3100 0.4\n",
        )
        .unwrap();
        let curve = det_curve(&reference, &system, &act(), 0.2, FaAxis::RateBased).unwrap();
        assert_eq!(curve.points.len(), 2);
        assert_eq!(curve.points[0].tau, 0.9);
        assert_eq!((curve.points[0].fa, curve.points[0].pmiss), (0.0, 0.5));
        assert_eq!(curve.points[1].tau, 0.4);
        assert!((curve.points[1].fa - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(curve.points[1].pmiss, 0.5);
    }

    #[test]
    fn lowering_tau_never_hurts_pmiss_or_helps_fa() {
        let reference = parse_ref(
            "#video f 9000 30\nreference act f 100 200\nreference act f 1000 1100\nreference act f 2000 2100\n",
        )
        .unwrap();
        let system = parse_sys(concat!(
            "#video f 9000 30\n",
            "system act f 110 190 0.95\n",
            "system act f 1010 1090 0.70\n",
            "system act f 4000 4100 0.60\n",
            "system act f 2010 2090 0.35\n",
            "system act f 5000 5400 0.20\n",
        ))
        .unwrap();
        for axis in [FaAxis::TimeBased, FaAxis::RateBased] {
            let curve = det_curve(&reference, &system, &act(), 0.2, axis).unwrap();
            for w in curve.points.windows(2) {
                assert!(w[0].tau >= w[1].tau);
                assert!(w[0].fa <= w[1].fa);
                assert!(w[0].pmiss >= w[1].pmiss);
            }
        }
    }

    fn hand_curve(points: &[(f64, f64)]) -> DetCurve {
        DetCurve {
            points: points
                .iter()
                .enumerate()
                .map(|(i, &(fa, pmiss))| DetPoint {
                    tau: 1.0 - i as f64 * 0.1,
                    fa,
                    pmiss,
                })
                .collect(),
            fa_axis: FaAxis::TimeBased,
        }
    }

    #[test]
    fn naudc_hand_integral() {
        // pmiss = 1 on [0, 0.1) (before the first point), 0.5 from 0.1 on:
        // (0.1·1 + 0.1·0.5)/0.2 = 0.75.
        let curve = hand_curve(&[(0.1, 0.5)]);
        assert!((naudc(&curve, 0.2) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn naudc_constant_curves() {
        assert_eq!(naudc(&hand_curve(&[(0.0, 0.0)]), 0.2), 0.0);
        assert_eq!(naudc(&hand_curve(&[(0.0, 1.0)]), 0.2), 1.0);
    }

    #[test]
    fn naudc_ignores_points_beyond_the_limit() {
        let curve = hand_curve(&[(0.0, 0.4), (0.5, 0.1)]);
        assert!((naudc(&curve, 0.2) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn naudc_keeps_the_best_pmiss_at_duplicate_fa() {
        // Two thresholds land on fa = 0; the cheaper pmiss is achievable
        // there, so it is the one integrated.
        let curve = hand_curve(&[(0.0, 0.8), (0.0, 0.3), (0.1, 0.1)]);
        let expected = (0.1 * 0.3 + 0.1 * 0.1) / 0.2;
        assert!((naudc(&curve, 0.2) - expected).abs() < 1e-12);
    }

    #[test]
    fn pmiss_at_rfa_interpolates_linearly() {
        let curve = hand_curve(&[(0.1, 0.8), (0.2, 0.4)]);
        assert!((pmiss_at_rfa(&curve, 0.15) - 0.6).abs() < 1e-12);
        // Below the first achievable operating point: cannot operate.
        assert_eq!(pmiss_at_rfa(&curve, 0.05), 1.0);
        // Beyond the last point the final miss rate extends.
        assert_eq!(pmiss_at_rfa(&curve, 0.5), 0.4);
        // Exactly on a point reads that point.
        assert_eq!(pmiss_at_rfa(&curve, 0.1), 0.8);
        assert_eq!(pmiss_at_rfa(&curve, 0.2), 0.4);
    }
}
