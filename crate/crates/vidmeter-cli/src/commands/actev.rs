//! Activity-detection scoring: per-activity DET point files, nAUDC
//! summaries with the miss rate at the target false-alarm level, per
//! system aggregates, and the cross-system activity-difficulty ranking.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use vidmeter::actev::{
    activity_ranking, det_curve, naudc, pmiss_at_rfa, DetCurve, FaAxis, MetricError,
};
use vidmeter::io::{parse_activity_set, ActivityInstanceSet, SetKind};
use vidmeter::types::{ActivityId, SystemId};

use crate::config::EvalConfig;
use crate::output::{expand_inputs, fmt_score, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct SystemSummary {
    system: SystemId,
    mean_naudc: f64,
    std_naudc: f64,
    activities_scored: usize,
}

#[derive(Serialize)]
struct ActevReport {
    header: ReportHeader,
    fa_axis: String,
    systems: Vec<SystemSummary>,
    warnings: Vec<String>,
}

fn parse_fa_axis(raw: &str) -> Result<FaAxis> {
    match raw {
        "time" => Ok(FaAxis::TimeBased),
        "rate" => Ok(FaAxis::RateBased),
        other => bail!("setting `fa-axis`: expected `time` or `rate`, got {other:?}"),
    }
}

fn load_set(path: &Path, kind: SetKind) -> Result<ActivityInstanceSet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_activity_set(&text, kind).with_context(|| format!("parsing {}", path.display()))
}

fn system_id(path: &Path) -> SystemId {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    SystemId::from(stem)
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let reference = load_set(&config.path("ref")?, SetKind::Reference)?;
    let sys_files = expand_inputs(&config.paths("sys")?)?;
    let theta = config.f64("theta")?;
    let limit = config.f64("naudc-limit")?;
    let pr_target = config.f64("pr-target")?;
    let fa_axis = parse_fa_axis(config.get("fa-axis").unwrap_or("time"))?;

    let writer = OutputWriter::new(config)?;
    let mut warnings = Vec::new();

    // Score every (system, activity) pair; activities the reference has
    // no instances for are flagged and excluded from aggregates.
    let mut systems: Vec<(SystemId, ActivityInstanceSet)> = Vec::new();
    for file in &sys_files {
        systems.push((system_id(file), load_set(file, SetKind::System)?));
    }
    systems.sort_by(|a, b| a.0.cmp(&b.0));

    let mut activities: Vec<ActivityId> = reference.activities().into_iter().cloned().collect();
    for (_, set) in &systems {
        for activity in set.activities() {
            if !activities.contains(activity) {
                activities.push(activity.clone());
            }
        }
    }
    activities.sort();

    let mut curves: BTreeMap<(SystemId, ActivityId), DetCurve> = BTreeMap::new();
    for (system, set) in &systems {
        for activity in &activities {
            match det_curve(&reference, set, activity, theta, fa_axis) {
                Ok(curve) => {
                    curves.insert((system.clone(), activity.clone()), curve);
                }
                Err(MetricError::NoTrueInstances) => {
                    warnings.push(format!(
                        "system {system}: activity {activity} has no reference instances; excluded"
                    ));
                }
                Err(err) => {
                    return Err(err).with_context(|| {
                        format!("scoring system {system}, activity {activity}")
                    });
                }
            }
        }
    }

    // One DET point file per scored (system, activity).
    for ((system, activity), curve) in &curves {
        let mut det_csv = String::from("tau,fa,pmiss\n");
        for point in &curve.points {
            let _ = writeln!(
                det_csv,
                "{},{},{}",
                fmt_score(point.tau),
                fmt_score(point.fa),
                fmt_score(point.pmiss)
            );
        }
        writer.text(&format!("det_{system}_{activity}.csv"), &det_csv)?;
    }

    // naudc_summary.csv — per pair: area and miss rate at the target
    // false-alarm level.
    let mut naudc_csv = String::from("system,activity,naudc,pmiss_at_target_fa\n");
    let mut scores: BTreeMap<SystemId, BTreeMap<ActivityId, f64>> = BTreeMap::new();
    for ((system, activity), curve) in &curves {
        let area = naudc(curve, limit);
        let at_target = pmiss_at_rfa(curve, pr_target);
        let _ = writeln!(
            naudc_csv,
            "{system},{activity},{},{}",
            fmt_score(area),
            fmt_score(at_target)
        );
        scores
            .entry(system.clone())
            .or_default()
            .insert(activity.clone(), area);
    }
    writer.text("naudc_summary.csv", &naudc_csv)?;

    // system_summary.csv — mean and population spread of nAUDC.
    let mut summaries = Vec::new();
    let mut system_csv = String::from("system,mean_naudc,std_naudc,activities_scored\n");
    for (system, per_activity) in &scores {
        let values: Vec<f64> = per_activity.values().copied().collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
        let std = var.sqrt();
        let _ = writeln!(
            system_csv,
            "{system},{},{},{}",
            fmt_score(mean),
            fmt_score(std),
            values.len()
        );
        summaries.push(SystemSummary {
            system: system.clone(),
            mean_naudc: mean,
            std_naudc: std,
            activities_scored: values.len(),
        });
    }
    writer.text("system_summary.csv", &system_csv)?;

    // activity_ranking.csv — per system, activities ranked easiest (1)
    // to hardest, plus the mean rank across systems.
    if scores.values().all(|m| m.len() == activities_count(&scores)) && !scores.is_empty() {
        let ranking = activity_ranking(&scores).context("ranking activities")?;
        let mut rank_csv = String::from("activity");
        for system in &ranking.systems {
            let _ = write!(rank_csv, ",{system}");
        }
        rank_csv.push_str(",AVG\n");
        for activity in &ranking.activities {
            let _ = write!(rank_csv, "{activity}");
            for system in &ranking.systems {
                let _ = write!(rank_csv, ",{}", ranking.ranks[system][activity]);
            }
            let _ = writeln!(rank_csv, ",{}", fmt_score(ranking.avg_rank[activity]));
        }
        writer.text("activity_ranking.csv", &rank_csv)?;
    } else {
        warnings.push(
            "activity ranking skipped: systems do not share a complete activity set".to_owned(),
        );
    }

    let report = ActevReport {
        header: ReportHeader::new(config)?,
        fa_axis: match fa_axis {
            FaAxis::TimeBased => "time".to_owned(),
            FaAxis::RateBased => "rate".to_owned(),
        },
        systems: summaries,
        warnings,
    };
    writer.json("report.json", &report)?;
    Ok(())
}

fn activities_count(scores: &BTreeMap<SystemId, BTreeMap<ActivityId, f64>>) -> usize {
    scores.values().map(|m| m.len()).max().unwrap_or(0)
}
