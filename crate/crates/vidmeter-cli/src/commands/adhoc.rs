//! Full ad-hoc search scoring pipeline: stratified-estimate AP per
//! topic, novelty scoring, uniqueness/overlap analysis, difficulty
//! split, and time-vs-score scatter data.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde::Serialize;

use vidmeter::io::parse_judgments;
use vidmeter::retrieval::{
    classify_topics, compute_novelty, inferred_precision_recall, pairwise_overlap,
    score_run_topics, unique_overlap_analysis, RunScore,
};
use vidmeter::types::{RunTag, TaskKind, TopicId};

use crate::config::EvalConfig;
use crate::output::{fmt_pct, fmt_score, load_runs, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct RunSummary {
    run: RunTag,
    team: String,
    novelty_run: bool,
    mean_xinfap: f64,
    flagged_topics: usize,
    novelty_score: Option<f64>,
}

#[derive(Serialize)]
struct AdhocReport {
    header: ReportHeader,
    runs: Vec<RunSummary>,
    overlap_mean_pct: Option<f64>,
    overlap_min_pct: Option<f64>,
    overlap_max_pct: Option<f64>,
    easy_topics: usize,
    hard_topics: usize,
    warnings: Vec<String>,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let runs = load_runs(config, TaskKind::Adhoc)?;
    let qrels_path = config.path("qrels")?;
    let qrels_text = fs::read_to_string(&qrels_path)
        .with_context(|| format!("reading {}", qrels_path.display()))?;
    let judgments = parse_judgments(&qrels_text)
        .with_context(|| format!("parsing judgments {}", qrels_path.display()))?;
    let epsilon = config.f64("epsilon")?;
    let cutoffs = config.cutoffs()?;
    let difficulty_threshold = config.f64_or("difficulty-threshold", 0.3)?;

    let scored: Vec<RunScore> = runs
        .iter()
        .map(|run| score_run_topics(run, &judgments, epsilon))
        .collect();
    let novelty = compute_novelty(&runs, &judgments).context("computing novelty scores")?;
    let uniqueness = unique_overlap_analysis(&runs, &judgments);
    let overlap = pairwise_overlap(&runs);

    let writer = OutputWriter::new(config)?;
    let mut warnings = Vec::new();

    // topics.csv — per run, per topic stratified-estimate AP.
    let mut topics_csv = String::from("run,topic,xinfap,estimated_relevant,flagged\n");
    let mut score_table: BTreeMap<RunTag, BTreeMap<TopicId, f64>> = BTreeMap::new();
    for score in &scored {
        for ts in &score.topic_scores {
            let _ = writeln!(
                topics_csv,
                "{},{},{},{},{}",
                score.run_tag,
                ts.topic,
                fmt_score(ts.value),
                fmt_score(ts.n_relevant_est),
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

    // pr_cutoffs.csv — estimated precision/recall at fixed depths.
    let mut pr_csv = String::from("run,topic,cutoff,precision,recall\n");
    for run in &runs {
        for (topic, tj) in judgments.topics() {
            let Some(entries) = run.topic_entries(topic) else {
                continue;
            };
            for &k in &cutoffs {
                let pr = inferred_precision_recall(entries, tj, k);
                let _ = writeln!(
                    pr_csv,
                    "{},{},{},{},{}",
                    run.run_tag,
                    topic,
                    k,
                    fmt_score(pr.precision),
                    fmt_score(pr.recall)
                );
            }
        }
    }
    writer.text("pr_cutoffs.csv", &pr_csv)?;

    // novelty_weights.csv — the run-independent weight table.
    let mut weights_csv = String::from("topic,shot,retrieved_by,total_runs,weight\n");
    for entry in &novelty.weight_table {
        let _ = writeln!(
            weights_csv,
            "{},{},{},{},{}",
            entry.topic,
            entry.shot,
            entry.retrieved_by,
            entry.total_runs,
            fmt_score(entry.weight)
        );
    }
    writer.text("novelty_weights.csv", &weights_csv)?;

    // novelty_runs.csv — per-run mean novelty score.
    let mut novelty_csv = String::from("run,comparison_size,mean_novelty\n");
    for (tag, score) in &novelty.per_run {
        let _ = writeln!(
            novelty_csv,
            "{},{},{}",
            tag,
            score.comparison_size,
            fmt_score(score.mean)
        );
    }
    writer.text("novelty_runs.csv", &novelty_csv)?;

    // unique_overlap.csv + team_unique.csv — judged-relevant shot
    // uniqueness at team granularity.
    let mut unique_csv = String::from("topic,unique,overlapping\n");
    for (topic, (unique, overlapping)) in &uniqueness.per_topic {
        let _ = writeln!(unique_csv, "{topic},{unique},{overlapping}");
    }
    writer.text("unique_overlap.csv", &unique_csv)?;

    let mut team_csv = String::from("team,unique_relevant\n");
    for (team, count) in &uniqueness.per_team {
        let _ = writeln!(team_csv, "{team},{count}");
    }
    writer.text("team_unique.csv", &team_csv)?;

    // difficulty.csv — how many runs beat the threshold per topic.
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

    // time_vs_score.csv — scatter data for runs reporting search time.
    let mut time_csv = String::from("run,mean_elapsed_seconds,mean_xinfap\n");
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
    writer.text("time_vs_score.csv", &time_csv)?;

    // run_overlap.csv — pairwise submitted-shot overlap.
    let mut overlap_csv = String::from("run_a,run_b,overlap_pct\n");
    if let Some(pairwise) = &overlap {
        for (a, b, pct) in &pairwise.pairs {
            let _ = writeln!(overlap_csv, "{a},{b},{}", fmt_pct(*pct));
        }
    }
    writer.text("run_overlap.csv", &overlap_csv)?;

    let easy = difficulty.rows.iter().filter(|r| r.easy).count();
    let report = AdhocReport {
        header: ReportHeader::new(config)?,
        runs: runs
            .iter()
            .zip(&scored)
            .map(|(run, score)| RunSummary {
                run: run.run_tag.clone(),
                team: run.team_or_tag().to_string(),
                novelty_run: run.novelty_run,
                mean_xinfap: score.mean,
                flagged_topics: score.topic_scores.iter().filter(|t| t.flagged).count(),
                novelty_score: novelty.per_run.get(&run.run_tag).map(|s| s.mean),
            })
            .collect(),
        overlap_mean_pct: overlap.as_ref().map(|o| o.mean_pct),
        overlap_min_pct: overlap.as_ref().map(|o| o.min_pct),
        overlap_max_pct: overlap.as_ref().map(|o| o.max_pct),
        easy_topics: easy,
        hard_topics: difficulty.rows.len() - easy,
        warnings,
    };
    writer.json("report.json", &report)?;
    Ok(())
}
