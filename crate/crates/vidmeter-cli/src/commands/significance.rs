//! Pairwise significance testing over a per-topic score table, plus the
//! equivalence-group layout.

use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use vidmeter::io::{parse_topic_scores, scores_by_metric};
use vidmeter::stats::{layout_text, significance_groups, significance_matrix};
use vidmeter::types::RunTag;

use crate::config::EvalConfig;
use crate::output::{fmt_score, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct SignificanceReport {
    header: ReportHeader,
    metric: String,
    runs: Vec<RunTag>,
    groups: usize,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let scores_path = config.path("scores")?;
    let rows = parse_topic_scores(
        &fs::read_to_string(&scores_path)
            .with_context(|| format!("reading {}", scores_path.display()))?,
    )
    .with_context(|| format!("parsing score table {}", scores_path.display()))?;

    // Use the requested metric, or the table's single metric when
    // unambiguous.
    let metric = match config.get("metric") {
        Some(m) => m.to_owned(),
        None => {
            let mut metrics: Vec<&str> = rows.iter().map(|r| r.metric.as_str()).collect();
            metrics.sort_unstable();
            metrics.dedup();
            match metrics[..] {
                [only] => only.to_owned(),
                _ => bail!(
                    "score table contains {} metrics ({}); pick one with --metric",
                    metrics.len(),
                    metrics.join(", ")
                ),
            }
        }
    };
    let table = scores_by_metric(&rows, &metric);
    if table.is_empty() {
        bail!("score table has no rows for metric {metric:?}");
    }

    let matrix = significance_matrix(
        &table,
        config.u64("iterations")?,
        config.seed()?,
        config.f64("alpha")?,
    )
    .context("running pairwise randomization tests")?;
    let groups = significance_groups(&matrix);

    let writer = OutputWriter::new(config)?;

    let mut means_csv = String::from("run,mean\n");
    for (run, mean) in matrix.runs.iter().zip(&matrix.means) {
        let _ = writeln!(means_csv, "{run},{}", fmt_score(*mean));
    }
    writer.text("run_means.csv", &means_csv)?;

    let mut matrix_csv = String::from("row,col,p,significant\n");
    for i in 0..matrix.runs.len() {
        for j in (i + 1)..matrix.runs.len() {
            let _ = writeln!(
                matrix_csv,
                "{},{},{},{}",
                matrix.runs[i],
                matrix.runs[j],
                fmt_score(matrix.p_values[i][j]),
                matrix.significant(i, j)
            );
        }
    }
    writer.text("significance.csv", &matrix_csv)?;

    writer.text("groups.txt", &layout_text(&groups))?;

    let report = SignificanceReport {
        header: ReportHeader::new(config)?,
        metric,
        runs: matrix.runs.clone(),
        groups: groups.len(),
    };
    writer.json("report.json", &report)?;
    Ok(())
}
