//! Direct-assessment scoring: worker quality control, per-worker rating
//! standardization, and the raw/z system scoreboards.
//!
//! Workers who rate degraded calibration captions at or above their
//! unpolluted mean fail quality control and are dropped from scoring
//! entirely; the scoreboard then standardizes each surviving worker
//! against their own rating distribution.

use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use vidmeter::io::parse_da_log;
use vidmeter::stats::{da_standardize, da_worker_qc};

use crate::config::EvalConfig;
use crate::output::{fmt_score, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct DaReport {
    header: ReportHeader,
    workers_total: usize,
    workers_passed_qc: usize,
    workers_unverifiable: usize,
    systems_scored: usize,
    warnings: Vec<String>,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let ratings_path = config.path("ratings")?;
    let log = parse_da_log(
        &fs::read_to_string(&ratings_path)
            .with_context(|| format!("reading {}", ratings_path.display()))?,
    )
    .with_context(|| format!("parsing rating log {}", ratings_path.display()))?;

    let qc = da_worker_qc(&log).context("running worker quality control")?;
    let passing = log.filter_workers(|w| qc.get(w).is_some_and(|q| q.passed));
    if passing.is_empty() {
        bail!("no workers passed quality control; nothing to score");
    }
    let board = da_standardize(&passing).context("standardizing ratings")?;

    let writer = OutputWriter::new(config)?;
    let mut warnings = Vec::new();

    // da_workers.csv — QC outcome for every worker, plus rating stats
    // for those who passed.
    let mut workers_csv = String::from(
        "worker,qc_passed,qc_unverifiable,mean_unpolluted,mean_polluted,n_ratings,mean,stddev,degenerate\n",
    );
    for (worker, outcome) in &qc {
        let fmt_opt = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), fmt_score);
        let stats = board.workers.get(worker);
        let _ = writeln!(
            workers_csv,
            "{worker},{},{},{},{},{},{},{},{}",
            outcome.passed,
            outcome.unverifiable,
            fmt_opt(outcome.mean_unpolluted),
            fmt_opt(outcome.mean_polluted),
            stats.map_or_else(|| "0".to_owned(), |s| s.n_ratings.to_string()),
            fmt_opt(stats.map(|s| s.mean)),
            fmt_opt(stats.map(|s| s.stddev)),
            stats.is_some_and(|s| s.degenerate),
        );
        if outcome.unverifiable {
            warnings.push(format!(
                "worker {worker}: no degraded calibration captions seen; quality unverifiable"
            ));
        }
        if stats.is_some_and(|s| s.degenerate) {
            warnings.push(format!(
                "worker {worker}: fewer than two ratings or zero spread; excluded from z scores"
            ));
        }
    }
    writer.text("da_workers.csv", &workers_csv)?;

    // da_scoreboard.csv — per-system raw and standardized means.
    let mut score_csv = String::from("system,raw_mean,z_mean,n_ratings,n_videos\n");
    for (system, score) in &board.systems {
        let _ = writeln!(
            score_csv,
            "{system},{},{},{},{}",
            fmt_score(score.raw_mean),
            fmt_score(score.z_mean),
            score.n_ratings,
            score.n_videos
        );
    }
    writer.text("da_scoreboard.csv", &score_csv)?;

    let report = DaReport {
        header: ReportHeader::new(config)?,
        workers_total: qc.len(),
        workers_passed_qc: qc.values().filter(|q| q.passed).count(),
        workers_unverifiable: qc.values().filter(|q| q.unverifiable).count(),
        systems_scored: board.systems.len(),
        warnings,
    };
    writer.json("report.json", &report)?;
    Ok(())
}
