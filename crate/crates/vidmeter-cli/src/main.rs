//! Batch scoring front end: wires the parsers, pooling, and metric
//! kernels into per-task pipelines and emits deterministic CSV/JSON
//! reports.
//!
//! Every command reads an optional `key=value` config file, applies flag
//! overrides, and stamps the resolved settings (and their SHA-256) into
//! each output. Identical inputs, config, and seed produce byte-identical
//! outputs regardless of thread count; `VIDMETER_THREADS` caps internal
//! parallelism.

mod commands;
mod config;
mod output;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::config::EvalConfig;

#[derive(Parser)]
#[command(name = "vidmeter", version, about = "Video benchmark scoring toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score ad-hoc search runs: stratified-estimate AP, novelty,
    /// uniqueness, difficulty, and overlap reports.
    ScoreAdhoc(CommonArgs),
    /// Score instance-search runs: AP/MAP, judging statistics, and the
    /// difficulty split.
    ScoreInstance(CommonArgs),
    /// Score activity detection: DET curves, nAUDC, and rankings.
    ScoreActev(CommonArgs),
    /// Score caption matching: mean inverted rank per set.
    ScoreVtt(CommonArgs),
    /// Score direct-assessment ratings: QC plus raw/z scoreboards.
    ScoreDa(CommonArgs),
    /// Build and sample a judging pool from submitted runs.
    Pool(CommonArgs),
    /// Pairwise randomization significance tests over a score table.
    Significance(CommonArgs),
    /// Pearson correlations between metric columns of a table.
    Correlate(CommonArgs),
}

/// Flags shared by all subcommands. Values stay as raw strings and are
/// resolved (defaults < config file < flags) by [`EvalConfig`].
#[derive(Args)]
struct CommonArgs {
    /// Line-oriented key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run files or directories, comma-separated.
    #[arg(long)]
    runs: Option<String>,
    /// Stratified relevance judgments file.
    #[arg(long)]
    qrels: Option<String>,
    /// Reference instance file (activity detection).
    #[arg(long = "ref")]
    reference: Option<String>,
    /// System output files or directories, comma-separated.
    #[arg(long)]
    sys: Option<String>,
    /// Caption ground-truth file.
    #[arg(long)]
    truth: Option<String>,
    /// Direct-assessment rating log.
    #[arg(long)]
    ratings: Option<String>,
    /// Per-topic score table or metric table.
    #[arg(long)]
    scores: Option<String>,
    /// Metric column to test when the score table has several.
    #[arg(long)]
    metric: Option<String>,
    /// Sampling / randomization seed.
    #[arg(long)]
    seed: Option<String>,
    /// Significance level for the randomization test.
    #[arg(long)]
    alpha: Option<String>,
    /// Temporal overlap threshold for instance alignment.
    #[arg(long)]
    theta: Option<String>,
    /// Upper false-alarm limit for nAUDC integration.
    #[arg(long = "naudc-limit")]
    naudc_limit: Option<String>,
    /// False-alarm axis for DET curves: `time` or `rate`.
    #[arg(long = "fa-axis")]
    fa_axis: Option<String>,
    /// False-alarm level for the miss-rate summary column.
    #[arg(long = "pr-target")]
    pr_target: Option<String>,
    /// Smoothing constant for stratified AP estimation.
    #[arg(long)]
    epsilon: Option<String>,
    /// Score threshold for the topic difficulty split.
    #[arg(long = "difficulty-threshold")]
    difficulty_threshold: Option<String>,
    /// Rank cutoffs for precision/recall tables, comma-separated.
    #[arg(long)]
    cutoffs: Option<String>,
    /// Monte Carlo iterations for the randomization test.
    #[arg(long)]
    iterations: Option<String>,
    /// Pool strata as `lo-hi:rate,...`.
    #[arg(long)]
    strata: Option<String>,
    /// Minimum retrieving runs for second-round judging candidates.
    #[arg(long = "rejudge-min-runs")]
    rejudge_min_runs: Option<String>,
    /// Maximum rank considered for second-round candidates.
    #[arg(long = "rejudge-max-rank")]
    rejudge_max_rank: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

impl CommonArgs {
    fn resolve(&self, task: &str) -> Result<EvalConfig> {
        let overrides: Vec<(&str, Option<String>)> = vec![
            ("task", Some(task.to_owned())),
            ("runs", self.runs.clone()),
            ("qrels", self.qrels.clone()),
            ("ref", self.reference.clone()),
            ("sys", self.sys.clone()),
            ("truth", self.truth.clone()),
            ("ratings", self.ratings.clone()),
            ("scores", self.scores.clone()),
            ("metric", self.metric.clone()),
            ("seed", self.seed.clone()),
            ("alpha", self.alpha.clone()),
            ("theta", self.theta.clone()),
            ("naudc-limit", self.naudc_limit.clone()),
            ("fa-axis", self.fa_axis.clone()),
            ("pr-target", self.pr_target.clone()),
            ("epsilon", self.epsilon.clone()),
            ("difficulty-threshold", self.difficulty_threshold.clone()),
            ("cutoffs", self.cutoffs.clone()),
            ("iterations", self.iterations.clone()),
            ("strata", self.strata.clone()),
            ("rejudge-min-runs", self.rejudge_min_runs.clone()),
            ("rejudge-max-rank", self.rejudge_max_rank.clone()),
            ("out", self.out.clone()),
        ];
        EvalConfig::resolve(self.config.as_deref(), &overrides)
    }
}

fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("VIDMETER_THREADS") {
        let threads: usize = raw
            .parse()
            .with_context(|| format!("VIDMETER_THREADS: expected an integer, got {raw:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("initializing thread pool")?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::ScoreAdhoc(args) => commands::adhoc::run(&args.resolve("adhoc")?),
        Command::ScoreInstance(args) => commands::instance::run(&args.resolve("instance")?),
        Command::ScoreActev(args) => commands::actev::run(&args.resolve("actev")?),
        Command::ScoreVtt(args) => commands::vtt::run(&args.resolve("vtt_matching")?),
        Command::ScoreDa(args) => commands::da::run(&args.resolve("da")?),
        Command::Pool(args) => commands::pool::run(&args.resolve("pool")?),
        Command::Significance(args) => commands::significance::run(&args.resolve("significance")?),
        Command::Correlate(args) => commands::correlate::run(&args.resolve("correlate")?),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = init_thread_pool().and_then(|()| dispatch(&cli)) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
