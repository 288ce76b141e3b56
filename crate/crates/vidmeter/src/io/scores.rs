//! Tabular score files the toolkit both emits and re-reads.
//!
//! Two shapes exist:
//!
//! * the per-topic score table, a CSV with header
//!   `run_tag,topic,metric,value` — the interchange format between the
//!   scoring commands and the significance-testing command;
//! * the metric table, a CSV whose first column is a unit identifier (a
//!   run, usually) and whose remaining columns are metric values — the
//!   input to correlation analysis.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::types::{RunTag, TopicId};

/// One row of a per-topic score table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRow {
    pub run_tag: RunTag,
    pub topic: TopicId,
    pub metric: String,
    pub value: f64,
}

/// A parsed metric table: `columns` holds the metric names in file order,
/// `rows` the per-unit values aligned with `columns`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricTable {
    pub columns: Vec<String>,
    pub rows: BTreeMap<String, Vec<f64>>,
}

impl MetricTable {
    /// The values of one metric across all units, in unit order.
    pub fn column(&self, metric: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == metric)?;
        Some(self.rows.values().map(|vals| vals[idx]).collect())
    }
}

/// Defects a score table can be rejected for.
#[derive(Debug, Error, PartialEq)]
pub enum ScoreTableError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("missing or wrong header line, expected {expected:?}")]
    MissingHeader { expected: String },
    #[error("duplicate entry for run {run_tag}, topic {topic}, metric {metric}")]
    DuplicateEntry {
        run_tag: RunTag,
        topic: TopicId,
        metric: String,
    },
}

const TOPIC_SCORES_HEADER: &str = "run_tag,topic,metric,value";

/// Parses a per-topic score table.
pub fn parse_topic_scores(input: &str) -> Result<Vec<ScoreRow>, ScoreTableError> {
    let malformed = |line: usize, reason: &str| ScoreTableError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == TOPIC_SCORES_HEADER => {}
        _ => {
            return Err(ScoreTableError::MissingHeader {
                expected: TOPIC_SCORES_HEADER.to_owned(),
            })
        }
    }

    let mut rows = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let [run_tag, topic, metric, value] = fields[..] else {
            return Err(malformed(line_no, "expected `run_tag,topic,metric,value`"));
        };
        let value: f64 = value
            .parse()
            .map_err(|_| malformed(line_no, "value must be a number"))?;
        let row = ScoreRow {
            run_tag: RunTag::from(run_tag),
            topic: TopicId::from(topic),
            metric: metric.to_owned(),
            value,
        };
        if !seen.insert((row.run_tag.clone(), row.topic.clone(), row.metric.clone())) {
            return Err(ScoreTableError::DuplicateEntry {
                run_tag: row.run_tag,
                topic: row.topic,
                metric: row.metric,
            });
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Writes a per-topic score table with values at four decimal places.
pub fn write_topic_scores(rows: &[ScoreRow]) -> String {
    let mut out = String::from(TOPIC_SCORES_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.4}\n",
            row.run_tag, row.topic, row.metric, row.value
        ));
    }
    out
}

/// Restricts score rows to one metric, grouped as run -> topic -> value.
pub fn scores_by_metric(
    rows: &[ScoreRow],
    metric: &str,
) -> BTreeMap<RunTag, BTreeMap<TopicId, f64>> {
    let mut out: BTreeMap<RunTag, BTreeMap<TopicId, f64>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.metric == metric) {
        out.entry(row.run_tag.clone())
            .or_default()
            .insert(row.topic.clone(), row.value);
    }
    out
}

/// Parses a metric table (`id,<metric>,...` header, one row per unit).
pub fn parse_metric_table(input: &str) -> Result<MetricTable, ScoreTableError> {
    let malformed = |line: usize, reason: &str| ScoreTableError::MalformedLine {
        line,
        reason: reason.to_owned(),
    };

    let mut lines = input.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| ScoreTableError::MissingHeader {
        expected: "id,<metric>,...".to_owned(),
    })?;
    let mut header_fields = header.trim_end_matches('\r').split(',');
    let _id_column = header_fields.next();
    let columns: Vec<String> = header_fields.map(str::to_owned).collect();
    if columns.is_empty() {
        return Err(ScoreTableError::MissingHeader {
            expected: "id,<metric>,...".to_owned(),
        });
    }

    let mut rows = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() + 1 {
            return Err(malformed(line_no, "row width does not match the header"));
        }
        let id = fields[0].to_owned();
        let values: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| malformed(line_no, "metric values must be numbers"))?;
        if rows.insert(id.clone(), values).is_some() {
            return Err(malformed(line_no, "duplicate unit identifier"));
        }
    }
    Ok(MetricTable { columns, rows })
}
