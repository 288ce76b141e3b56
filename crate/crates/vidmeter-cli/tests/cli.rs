//! End-to-end tests of the `vidmeter` binary: exit codes, structured
//! errors, and byte-level determinism of the emitted reports.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn vidmeter(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_vidmeter"));
    cmd.args(args);
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("binary runs")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Every regular file under `dir`, keyed by name, with its raw bytes.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        out.insert(
            entry.file_name().to_string_lossy().into_owned(),
            fs::read(entry.path()).unwrap(),
        );
    }
    out
}

fn write_adhoc_fixture(dir: &Path) -> (String, String) {
    let run_a = "\
#training D
t01 Q0 shotA 1 0.9 runA
t01 Q0 shotB 2 0.8 runA
t02 Q0 shotC 1 0.9 runA
t02 Q0 shotD 2 0.7 runA
";
    let run_b = "\
#training E
t01 Q0 shotB 1 0.9 runB
t01 Q0 shotE 2 0.5 runB
t02 Q0 shotC 1 0.6 runB
t02 Q0 shotF 2 0.2 runB
";
    let qrels = "\
#stratum t01 s1 1 1000 4
#stratum t02 s1 1 1000 4
t01 s1 shotA 1
t01 s1 shotB 1
t01 s1 shotE 0
t02 s1 shotC 1
t02 s1 shotD 0
t02 s1 shotF 0
";
    let runs_dir = dir.join("runs");
    fs::create_dir(&runs_dir).unwrap();
    fs::write(runs_dir.join("runA.txt"), run_a).unwrap();
    fs::write(runs_dir.join("runB.txt"), run_b).unwrap();
    let qrels_path = dir.join("qrels.txt");
    fs::write(&qrels_path, qrels).unwrap();
    (
        runs_dir.to_string_lossy().into_owned(),
        qrels_path.to_string_lossy().into_owned(),
    )
}

#[test]
fn score_adhoc_emits_all_sections_and_is_rerun_stable() {
    let dir = TempDir::new().unwrap();
    let (runs, qrels) = write_adhoc_fixture(dir.path());
    let out = dir.path().join("report");
    let out_str = out.to_string_lossy().into_owned();

    let first = vidmeter(
        &["score-adhoc", "--runs", &runs, "--qrels", &qrels, "--out", &out_str],
        &[],
    );
    assert!(first.status.success(), "stderr: {}", stderr(&first));
    for name in [
        "report.json",
        "topics.csv",
        "pr_cutoffs.csv",
        "novelty_weights.csv",
        "novelty_runs.csv",
        "unique_overlap.csv",
        "team_unique.csv",
        "difficulty.csv",
        "time_vs_score.csv",
        "run_overlap.csv",
    ] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let before = snapshot(&out);

    let second = vidmeter(
        &["score-adhoc", "--runs", &runs, "--qrels", &qrels, "--out", &out_str],
        &[],
    );
    assert!(second.status.success());
    assert_eq!(before, snapshot(&out), "rerun changed output bytes");

    // Every text output carries the version/config/seed header.
    let topics = fs::read_to_string(out.join("topics.csv")).unwrap();
    assert!(topics.starts_with("# vidmeter "));
    assert!(topics.contains("# config-sha256 "));
    assert!(topics.contains("# seed 0"));
    // LF only.
    assert!(!topics.contains('\r'));

    let report = fs::read_to_string(out.join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["header"]["tool"].as_str().unwrap().split(' ').next(), Some("vidmeter"));
    assert_eq!(json["header"]["config"]["alpha"], "0.05");
    assert_eq!(json["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_judgments_file_fails_with_context() {
    let dir = TempDir::new().unwrap();
    let (runs, _) = write_adhoc_fixture(dir.path());
    let out = dir.path().join("report");

    let result = vidmeter(
        &[
            "score-adhoc",
            "--runs",
            &runs,
            "--qrels",
            "/nonexistent/qrels.txt",
            "--out",
            &out.to_string_lossy(),
        ],
        &[],
    );
    assert_eq!(result.status.code(), Some(1));
    let err = stderr(&result);
    assert!(err.contains("/nonexistent/qrels.txt"), "stderr: {err}");
}

#[test]
fn malformed_run_file_reports_line_and_exits_nonzero() {
    let dir = TempDir::new().unwrap();
    let (_, qrels) = write_adhoc_fixture(dir.path());
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "t01 Q0 shotA 1 0.9 runX\nt01 Q0 shotB 3 0.8 runX\n").unwrap();

    let result = vidmeter(
        &[
            "score-adhoc",
            "--runs",
            &bad.to_string_lossy(),
            "--qrels",
            &qrels,
            "--out",
            &dir.path().join("report").to_string_lossy(),
        ],
        &[],
    );
    assert_eq!(result.status.code(), Some(1));
    let err = stderr(&result);
    assert!(err.contains("bad.txt"), "stderr: {err}");
    assert!(err.contains("ranks"), "stderr: {err}");
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let (runs, qrels) = write_adhoc_fixture(dir.path());
    let config = dir.path().join("eval.conf");
    fs::write(
        &config,
        format!("runs={runs}\nqrels={qrels}\nseed=5\n"),
    )
    .unwrap();
    let out = dir.path().join("report");

    let result = vidmeter(
        &[
            "score-adhoc",
            "--config",
            &config.to_string_lossy(),
            "--seed",
            "9",
            "--out",
            &out.to_string_lossy(),
        ],
        &[],
    );
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let topics = fs::read_to_string(out.join("topics.csv")).unwrap();
    assert!(topics.contains("# seed 9"), "flag must beat config file");
}

#[test]
fn pool_command_is_deterministic_for_a_seed_and_differs_across_seeds() {
    let dir = TempDir::new().unwrap();
    // One 40-entry run: the sampled stratum draws 8 of 32 candidates, so
    // two seeds agreeing by chance is effectively impossible.
    let mut run = String::new();
    for rank in 1..=40 {
        run.push_str(&format!("t01 Q0 shot{rank:03} {rank} {} deep\n", 1.0 - rank as f64 / 50.0));
    }
    let runs = dir.path().join("deep.txt");
    fs::write(&runs, run).unwrap();
    let runs = runs.to_string_lossy().into_owned();
    let run_pool = |seed: &str, out: &Path| {
        let result = vidmeter(
            &[
                "pool",
                "--runs",
                &runs,
                "--strata",
                "1-8:1.0,9-40:0.25",
                "--seed",
                seed,
                "--out",
                &out.to_string_lossy(),
            ],
            &[],
        );
        assert!(result.status.success(), "stderr: {}", stderr(&result));
        fs::read_to_string(out.join("sample.txt")).unwrap()
    };

    let a1 = run_pool("1", &dir.path().join("p1"));
    let a2 = run_pool("1", &dir.path().join("p2"));
    // Strip headers (seed appears there) before comparing the sample body.
    let body = |s: &str| {
        s.lines()
            .filter(|l| !l.starts_with('#'))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(a1, a2);
    let b = run_pool("2", &dir.path().join("p3"));
    assert_ne!(body(&a1), body(&b), "different seeds should sample differently");
}

#[test]
fn actev_scoring_emits_det_points_and_summaries() {
    let dir = TempDir::new().unwrap();
    let reference = "\
#video v1 9000 30
reference act1 v1 100 400
reference act1 v1 1000 1300
reference act2 v1 2000 2300
";
    let system = "\
#video v1 9000 30
system act1 v1 110 390 0.9
system act1 v1 5000 5200 0.4
system act2 v1 2010 2290 0.8
";
    let ref_path = dir.path().join("ref.txt");
    let sys_path = dir.path().join("sysA.txt");
    fs::write(&ref_path, reference).unwrap();
    fs::write(&sys_path, system).unwrap();
    let out = dir.path().join("report");

    let result = vidmeter(
        &[
            "score-actev",
            "--ref",
            &ref_path.to_string_lossy(),
            "--sys",
            &sys_path.to_string_lossy(),
            "--out",
            &out.to_string_lossy(),
        ],
        &[],
    );
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let det = fs::read_to_string(out.join("det_sysA_act1.csv")).unwrap();
    assert!(det.contains("tau,fa,pmiss"), "{det}");
    assert!(out.join("naudc_summary.csv").exists());
    assert!(out.join("system_summary.csv").exists());
    assert!(out.join("activity_ranking.csv").exists());
    let ranking = fs::read_to_string(out.join("activity_ranking.csv")).unwrap();
    assert!(ranking.contains("activity,sysA,AVG"), "{ranking}");
}

#[test]
fn vtt_da_significance_and_correlate_produce_expected_tables() {
    let dir = TempDir::new().unwrap();
    let out_root = dir.path();

    // Caption matching: ranks {1, 2} -> per-set mir 0.75.
    fs::write(out_root.join("truth.txt"), "A v1 c1\nA v2 c2\n").unwrap();
    fs::write(
        out_root.join("ranks.txt"),
        "A v1 1 c1\nA v2 1 cx\nA v2 2 c2\n",
    )
    .unwrap();
    let vtt_out = out_root.join("vtt");
    let result = vidmeter(
        &[
            "score-vtt",
            "--sys",
            &out_root.join("ranks.txt").to_string_lossy(),
            "--truth",
            &out_root.join("truth.txt").to_string_lossy(),
            "--out",
            &vtt_out.to_string_lossy(),
        ],
        &[],
    );
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let mir = fs::read_to_string(vtt_out.join("mir.csv")).unwrap();
    assert!(mir.contains("A,0.7500"), "{mir}");
    assert!(mir.contains("overall,0.7500"), "{mir}");

    // Direct assessment: one clean worker, one who fails QC.
    let ratings = "\
good sys1 v1 80 0
good sys1 v2 60 0
good sys1 v3 20 1
bad sys1 v1 50 0
bad sys1 v2 50 1
";
    fs::write(out_root.join("ratings.txt"), ratings).unwrap();
    let da_out = out_root.join("da");
    let result = vidmeter(
        &[
            "score-da",
            "--ratings",
            &out_root.join("ratings.txt").to_string_lossy(),
            "--out",
            &da_out.to_string_lossy(),
        ],
        &[],
    );
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let workers = fs::read_to_string(da_out.join("da_workers.csv")).unwrap();
    assert!(workers.contains("good,true"), "{workers}");
    assert!(workers.contains("bad,false"), "{workers}");
    let board = fs::read_to_string(da_out.join("da_scoreboard.csv")).unwrap();
    assert!(board.contains("sys1,"), "{board}");

    // Significance: clear separation between a strong and a weak run.
    let mut scores = String::from("run_tag,topic,metric,value\n");
    for topic in 0..10 {
        scores.push_str(&format!("strong,t{topic:02},ap,0.9\n"));
        scores.push_str(&format!("weak,t{topic:02},ap,0.1\n"));
    }
    fs::write(out_root.join("scores.txt"), &scores).unwrap();
    let sig_out = out_root.join("sig");
    let result = vidmeter(
        &[
            "significance",
            "--scores",
            &out_root.join("scores.txt").to_string_lossy(),
            "--out",
            &sig_out.to_string_lossy(),
        ],
        &[],
    );
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let matrix = fs::read_to_string(sig_out.join("significance.csv")).unwrap();
    assert!(matrix.contains("strong,weak"), "{matrix}");
    let groups = fs::read_to_string(sig_out.join("groups.txt")).unwrap();
    assert!(groups.contains("* strong"), "{groups}");
    assert!(groups.contains("# weak"), "{groups}");

    // Correlation: one perfectly anti-correlated metric pair.
    fs::write(
        out_root.join("table.csv"),
        "id,fast,slow\nr1,1.0,3.0\nr2,2.0,2.0\nr3,3.0,1.0\n",
    )
    .unwrap();
    let cor_out = out_root.join("cor");
    let result = vidmeter(
        &[
            "correlate",
            "--scores",
            &out_root.join("table.csv").to_string_lossy(),
            "--out",
            &cor_out.to_string_lossy(),
        ],
        &[],
    );
    assert!(result.status.success(), "stderr: {}", stderr(&result));
    let pearson = fs::read_to_string(cor_out.join("pearson.csv")).unwrap();
    assert!(pearson.contains("fast,1.0000,-1.0000"), "{pearson}");
}

#[test]
fn thread_cap_env_var_does_not_change_outputs() {
    let dir = TempDir::new().unwrap();
    let (runs, qrels) = write_adhoc_fixture(dir.path());
    let run_with = |threads: &str, out: &Path| {
        let result = vidmeter(
            &[
                "score-adhoc",
                "--runs",
                &runs,
                "--qrels",
                &qrels,
                "--out",
                &out.to_string_lossy(),
            ],
            &[("VIDMETER_THREADS", threads)],
        );
        assert!(result.status.success(), "stderr: {}", stderr(&result));
        snapshot(out)
    };
    let single = run_with("1", &dir.path().join("t1"));
    let multi = run_with("4", &dir.path().join("t4"));
    assert_eq!(single, multi);
}
