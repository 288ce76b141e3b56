//! Pool construction: union the submitted shots per stratum, draw the
//! seeded judging sample, and (when judgments exist) report judging
//! statistics and second-round candidates.

use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde::Serialize;

use vidmeter::io::parse_judgments;
use vidmeter::pooling::{
    build_pool, judging_stats, rejudge_candidates, sample_pool, stats_csv, PoolPlan,
};
use vidmeter::types::TaskKind;

use crate::config::EvalConfig;
use crate::output::{load_runs, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct PoolReport {
    header: ReportHeader,
    runs: usize,
    topics: usize,
    pool_size: usize,
    sample_size: usize,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let runs = load_runs(config, TaskKind::Adhoc)?;
    let plan = PoolPlan::new(config.strata()?, config.seed()?).context("building pool plan")?;
    let pool = build_pool(&runs, &plan).context("building pool")?;
    let sample = sample_pool(&pool, &plan).context("sampling pool")?;

    let writer = OutputWriter::new(config)?;
    writer.text("pool.txt", &pool.to_file())?;
    writer.text("sample.txt", &sample.to_file())?;

    if config.get("qrels").is_some() {
        let qrels_path = config.path("qrels")?;
        let judgments = parse_judgments(
            &fs::read_to_string(&qrels_path)
                .with_context(|| format!("reading {}", qrels_path.display()))?,
        )
        .with_context(|| format!("parsing judgments {}", qrels_path.display()))?;
        writer.text(
            "judging_stats.csv",
            &stats_csv(&judging_stats(&runs, &judgments)),
        )?;
    }

    if let Some(min_runs) = config.get("rejudge-min-runs") {
        let min_runs: usize = min_runs
            .parse()
            .context("setting `rejudge-min-runs`: expected an integer")?;
        let max_rank = config.u64("rejudge-max-rank").unwrap_or(
            plan.strata
                .iter()
                .map(|s| u64::from(s.rank_hi))
                .max()
                .unwrap_or(0),
        ) as u32;
        let mut rejudge_csv = String::from("topic,shot,retrieved_by\n");
        for (topic, shots) in rejudge_candidates(&runs, min_runs, max_rank) {
            for (shot, count) in shots {
                let _ = writeln!(rejudge_csv, "{topic},{shot},{count}");
            }
        }
        writer.text("rejudge.csv", &rejudge_csv)?;
    }

    let topics = pool.topics().count();
    let report = PoolReport {
        header: ReportHeader::new(config)?,
        runs: runs.len(),
        topics,
        pool_size: pool
            .topics()
            .map(|(_, strata)| strata.iter().map(|s| s.len()).sum::<usize>())
            .sum(),
        sample_size: sample
            .topics()
            .map(|(_, strata)| strata.iter().map(|s| s.len()).sum::<usize>())
            .sum(),
    };
    writer.json("report.json", &report)?;
    Ok(())
}
