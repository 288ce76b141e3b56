//! Pearson correlation matrix over the metric columns of a table.

use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde::Serialize;

use vidmeter::io::parse_metric_table;
use vidmeter::stats::pearson_matrix;

use crate::config::EvalConfig;
use crate::output::{fmt_score, OutputWriter, ReportHeader};

#[derive(Serialize)]
struct CorrelateReport {
    header: ReportHeader,
    metrics: Vec<String>,
    units: usize,
}

pub fn run(config: &EvalConfig) -> Result<()> {
    let scores_path = config.path("scores")?;
    let table = parse_metric_table(
        &fs::read_to_string(&scores_path)
            .with_context(|| format!("reading {}", scores_path.display()))?,
    )
    .with_context(|| format!("parsing metric table {}", scores_path.display()))?;

    let series: Vec<(String, Vec<f64>)> = table
        .columns
        .iter()
        .map(|metric| {
            let column = table
                .column(metric)
                .expect("column listed in the table header");
            (metric.clone(), column)
        })
        .collect();
    let matrix = pearson_matrix(&series).context("computing correlations")?;

    let writer = OutputWriter::new(config)?;
    let mut csv = String::from("metric");
    for label in &matrix.labels {
        let _ = write!(csv, ",{label}");
    }
    csv.push('\n');
    for (label, row) in matrix.labels.iter().zip(&matrix.values) {
        let _ = write!(csv, "{label}");
        for value in row {
            let _ = write!(csv, ",{}", fmt_score(*value));
        }
        csv.push('\n');
    }
    writer.text("pearson.csv", &csv)?;

    writer.json(
        "report.json",
        &CorrelateReport {
            header: ReportHeader::new(config)?,
            metrics: matrix.labels.clone(),
            units: table.rows.len(),
        },
    )?;
    Ok(())
}
