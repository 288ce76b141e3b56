//! Instance-search scoring: exact average precision per topic, MAP per
//! run, pooling/judging statistics, and the difficulty split.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde::Serialize;

use vidmeter::io::parse_judgments;
use vidmeter::pooling::{judging_stats, stats_csv};
use vidmeter::retrieval::{classify_topics, mean_average_precision, RunScore};
use vidmeter::types::{RunTag, TaskKind, TopicId};

use crate::config::EvalConfig;
use crate::output::{fmt_score, load_runs, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct RunSummary {
    run: RunTag,
    map: f64,
    flagged_topics: usize,
}

#[derive(Serialize)]
struct InstanceReport {
    header: ReportHeader,
    runs: Vec<RunSummary>,
    easy_topics: usize,
    hard_topics: usize,
    warnings: Vec<String>,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let runs = load_runs(config, TaskKind::Instance)?;
    let qrels_path = config.path("qrels")?;
    let qrels_text = fs::read_to_string(&qrels_path)
        .with_context(|| format!("reading {}", qrels_path.display()))?;
    let judgments = parse_judgments(&qrels_text)
        .with_context(|| format!("parsing judgments {}", qrels_path.display()))?;
    let difficulty_threshold = config.f64_or("difficulty-threshold", 0.06)?;

    let scored: Vec<RunScore> = runs
        .iter()
        .map(|run| mean_average_precision(run, &judgments))
        .collect();

    let writer = OutputWriter::new(config)?;
    let mut warnings = Vec::new();

    let mut topics_csv = String::from("run,topic,ap,flagged\n");
    let mut score_table: BTreeMap<RunTag, BTreeMap<TopicId, f64>> = BTreeMap::new();
    for score in &scored {
        for ts in &score.topic_scores {
            let _ = writeln!(
                topics_csv,
                "{},{},{},{}",
                score.run_tag,
                ts.topic,
                fmt_score(ts.value),
                ts.flagged
            );
            if ts.flagged {
                warnings.push(format!(
                    "run {}: topic {} scored as fallback (no judged-relevant shots or topic skipped)",
                    score.run_tag, ts.topic
                ));
            }
            score_table
                .entry(score.run_tag.clone())
                .or_default()
                .insert(ts.topic.clone(), ts.value);
        }
    }
    writer.text("topics.csv", &topics_csv)?;

    writer.text(
        "judging_stats.csv",
        &stats_csv(&judging_stats(&runs, &judgments)),
    )?;

    let difficulty = classify_topics(&score_table, difficulty_threshold);
    let mut diff_csv = String::from("topic,runs_at_or_above,total_runs,easy\n");
    for row in &difficulty.rows {
        let _ = writeln!(
            diff_csv,
            "{},{},{},{}",
            row.topic, row.runs_at_or_above, row.total_runs, row.easy
        );
    }
    writer.text("difficulty.csv", &diff_csv)?;

    let mut time_csv = String::from("run,mean_elapsed_seconds,map\n");
    for (run, score) in runs.iter().zip(&scored) {
        let elapsed: Vec<f64> = run.elapsed_entries().map(|(_, s)| s).collect();
        if elapsed.is_empty() {
            continue;
        }
        let mean_elapsed = elapsed.iter().sum::<f64>() / elapsed.len() as f64;
        let _ = writeln!(
            time_csv,
            "{},{},{}",
            run.run_tag,
            fmt_score(mean_elapsed),
            fmt_score(score.mean)
        );
    }
    writer.text("map_vs_time.csv", &time_csv)?;

    let easy = difficulty.rows.iter().filter(|r| r.easy).count();
    let report = InstanceReport {
        header: ReportHeader::new(config)?,
        runs: scored
            .iter()
            .map(|score| RunSummary {
                run: score.run_tag.clone(),
                map: score.mean,
                flagged_topics: score.topic_scores.iter().filter(|t| t.flagged).count(),
            })
            .collect(),
        easy_topics: easy,
        hard_topics: difficulty.rows.len() - easy,
        warnings,
    };
    writer.json("report.json", &report)?;
    Ok(())
}
