//! Deterministic output emission and shared input loading.
//!
//! All files are UTF-8 with LF line endings, written single-threaded in
//! a fixed order, with no timestamps — rerunning a command on the same
//! inputs and config produces byte-identical files.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use vidmeter::io::{parse_run, RankedRun};
use vidmeter::types::TaskKind;

use crate::config::{EvalConfig, TOOL_VERSION};

/// Writes report files into one output directory, stamping the config
/// header onto every text file.
pub struct OutputWriter {
    dir: PathBuf,
    header: String,
}

impl OutputWriter {
    pub fn new(config: &EvalConfig) -> Result<Self> {
        let dir = config.path("out")?;
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(OutputWriter {
            dir,
            header: config.file_header(),
        })
    }

    /// Writes a CSV/text file with the standard comment header.
    pub fn text(&self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        let content = format!("{}{}", self.header, body);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Writes the JSON report; the header object carries the tool
    /// version, full config, config hash, and seed.
    pub fn json<T: Serialize>(&self, name: &str, report: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut content = serde_json::to_string_pretty(report).context("serializing report")?;
        content.push('\n');
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// The `header` field of every JSON report.
#[derive(Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub config: std::collections::BTreeMap<String, String>,
}

impl ReportHeader {
    pub fn new(config: &EvalConfig) -> Result<Self> {
        Ok(ReportHeader {
            tool: TOOL_VERSION,
            config_sha256: config.sha256(),
            seed: config.seed()?,
            config: config.as_map(),
        })
    }
}

/// Expands a path list: directories become their (sorted) plain files,
/// dotfiles skipped; regular files pass through.
pub fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut children: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("listing {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.is_file()
                        && !p
                            .file_name()
                            .is_some_and(|n| n.to_string_lossy().starts_with('.'))
                })
                .collect();
            children.sort();
            out.extend(children);
        } else if path.is_file() {
            out.push(path.clone());
        } else {
            bail!("input {} does not exist", path.display());
        }
    }
    if out.is_empty() {
        bail!("no input files found");
    }
    Ok(out)
}

/// Loads and validates every run file named by the `runs` setting.
pub fn load_runs(config: &EvalConfig, task: TaskKind) -> Result<Vec<RankedRun>> {
    let files = expand_inputs(&config.paths("runs")?)?;
    let mut runs = Vec::with_capacity(files.len());
    for file in &files {
        let text =
            fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        let run =
            parse_run(&text, task).with_context(|| format!("parsing run {}", file.display()))?;
        runs.push(run);
    }
    Ok(runs)
}

/// Fixed-precision score formatting: 4 decimals.
pub fn fmt_score(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.4}")
}

/// Fixed-precision percentage formatting: 2 decimals.
pub fn fmt_pct(v: f64) -> String {
    format!("{v:.2}")
}
