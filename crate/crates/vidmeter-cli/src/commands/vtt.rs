//! Caption-matching scoring: mean inverted rank per caption set and
//! overall.

use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde::Serialize;

use vidmeter::io::{parse_caption_ranks, parse_caption_truth};
use vidmeter::retrieval::mean_inverted_rank;

use crate::config::EvalConfig;
use crate::output::{fmt_score, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct VttReport {
    header: ReportHeader,
    overall_mir: f64,
    video_count: usize,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let sys_path = config.path("sys")?;
    let truth_path = config.path("truth")?;
    let submission = parse_caption_ranks(
        &fs::read_to_string(&sys_path)
            .with_context(|| format!("reading {}", sys_path.display()))?,
    )
    .with_context(|| format!("parsing ranked captions {}", sys_path.display()))?;
    let truth = parse_caption_truth(
        &fs::read_to_string(&truth_path)
            .with_context(|| format!("reading {}", truth_path.display()))?,
    )
    .with_context(|| format!("parsing caption truth {}", truth_path.display()))?;

    let mir = mean_inverted_rank(&submission, &truth).context("scoring caption matching")?;

    let writer = OutputWriter::new(config)?;
    let mut mir_csv = String::from("set,mir\n");
    for (set, value) in &mir.per_set {
        let _ = writeln!(mir_csv, "{set},{}", fmt_score(*value));
    }
    let _ = writeln!(mir_csv, "overall,{}", fmt_score(mir.overall));
    writer.text("mir.csv", &mir_csv)?;

    writer.json(
        "report.json",
        &VttReport {
            header: ReportHeader::new(config)?,
            overall_mir: mir.overall,
            video_count: mir.video_count,
        },
    )?;
    Ok(())
}
