//! Average precision, exact and inferred.
//!
//! Exact AP assumes every retrieved shot has a judgment:
//!
//! ```text
//! AP = (1/R) * sum over relevant retrieved shots at rank k of P@k
//! ```
//!
//! with `R` the number of relevant shots in the collection. When pools are
//! stratified and only sampled fractions were judged, AP is replaced by an
//! estimator: each stratum's judged shots stand in for the rest of the
//! stratum at a known sampling rate, precision above a rank is estimated
//! stratum by stratum, and every judged relevant shot is weighted by the
//! inverse of its stratum's rate. With all rates at 1.0 the estimator
//! collapses to exact AP (up to the smoothing constant), and averaged over
//! repeated samples it recovers the fully-judged value — both properties
//! are pinned down in this crate's test suites.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::io::{RankedRun, RunEntry, StratifiedJudgments, TopicJudgments};
use crate::types::{RunTag, ShotId};

use super::TopicScore;

/// Smoothing constant for per-stratum precision estimates. Keeps strata
/// whose sample above a rank happens to be empty from producing 0/0.
pub const DEFAULT_EPSILON: f64 = 1e-5;

/// Exact average precision of a ranked list against a relevant set.
///
/// Returns 0 when `relevant` is empty; callers that need to distinguish
/// "no relevant shots exist" from "found nothing" flag that case
/// themselves (see [`mean_average_precision`]).
pub fn average_precision<'a>(
    ranked: impl IntoIterator<Item = &'a ShotId>,
    relevant: &BTreeSet<ShotId>,
) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut hits = 0u64;
    let mut sum = 0.0;
    for (idx, shot) in ranked.into_iter().enumerate() {
        if relevant.contains(shot) {
            hits += 1;
            sum += hits as f64 / (idx + 1) as f64;
        }
    }
    sum / relevant.len() as f64
}

/// A run's score under one measure: the per-topic breakdown and its
/// unweighted mean over every evaluated topic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunScore {
    pub run_tag: RunTag,
    pub metric: String,
    pub mean: f64,
    pub topic_scores: Vec<TopicScore>,
}

/// Exact mean average precision of a run over the judged topics.
///
/// Every topic in `judgments` is evaluated. A topic the run skipped, or
/// one without judged-relevant shots, scores 0 and is flagged rather than
/// silently dropped — the mean divides by the full topic count either way.
pub fn mean_average_precision(run: &RankedRun, judgments: &StratifiedJudgments) -> RunScore {
    let mut topic_scores = Vec::new();
    for (topic, tj) in judgments.topics() {
        let relevant: BTreeSet<ShotId> = tj.relevant_shots().cloned().collect();
        let entries = run.topic_entries(topic);
        let value = match entries {
            Some(entries) if !relevant.is_empty() => {
                average_precision(entries.iter().map(|e| &e.shot), &relevant)
            }
            _ => 0.0,
        };
        topic_scores.push(TopicScore {
            topic: topic.clone(),
            value,
            metric: "ap".to_owned(),
            n_relevant_est: relevant.len() as f64,
            flagged: entries.is_none() || relevant.is_empty(),
        });
    }
    let mean = if topic_scores.is_empty() {
        0.0
    } else {
        topic_scores.iter().map(|t| t.value).sum::<f64>() / topic_scores.len() as f64
    };
    RunScore {
        run_tag: run.run_tag.clone(),
        metric: "ap".to_owned(),
        mean,
        topic_scores,
    }
}

/// Result of the inferred-AP estimator on one topic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InferredApScore {
    pub value: f64,
    /// Estimated relevant total the denominator used.
    pub estimated_relevant: f64,
    /// True when the topic had no judged relevant shots (value is 0).
    pub flagged: bool,
}

/// Extended inferred average precision of one topic's ranked list.
///
/// With `R^ = sum_s rel_s / rate_s` estimated from the judgment file, each
/// judged relevant shot retrieved at rank `k` contributes an expected
/// precision
///
/// ```text
/// E[P@k] = 1/k + ((k-1)/k) * sum_s (pooled_s / (k-1))
///                          * (rel_s + eps) / (rel_s + nonrel_s + 2*eps)
/// ```
///
/// where, among the `k-1` shots ranked above it, `pooled_s` counts those
/// belonging to stratum `s` and `rel_s`/`nonrel_s` count the judged ones.
/// Judged shots carry their stratum from the judgment file; unjudged shots
/// are attributed by the rank band their position falls in and contribute
/// only through `pooled_s`. Unjudged shots at ranks outside every stratum
/// are outside the sampling frame entirely and contribute nothing. The
/// final value is `(1/R^) * sum (1/rate_s(shot)) * E[P@k]` over judged
/// relevant retrieved shots, which always lands in `[0, 1]`.
pub fn extended_inferred_ap(
    entries: &[RunEntry],
    tj: &TopicJudgments,
    epsilon: f64,
) -> InferredApScore {
    let r_hat = tj.estimated_relevant();
    if r_hat <= 0.0 {
        return InferredApScore {
            value: 0.0,
            estimated_relevant: r_hat,
            flagged: true,
        };
    }

    let n_strata = tj.strata().len();
    let mut pooled_above = vec![0u64; n_strata];
    let mut rel_above = vec![0u64; n_strata];
    let mut nonrel_above = vec![0u64; n_strata];

    let mut sum = 0.0;
    for entry in entries {
        let k = entry.rank as f64;
        let judged = tj.judgment_indexed(&entry.shot);
        let stratum = match judged {
            Some((idx, _)) => Some(idx),
            None => tj.stratum_index_for_rank(entry.rank),
        };

        if let Some((idx, true)) = judged {
            let mut above = 0.0;
            if entry.rank > 1 {
                for s in 0..n_strata {
                    if pooled_above[s] == 0 {
                        continue;
                    }
                    let rel = rel_above[s] as f64;
                    let nonrel = nonrel_above[s] as f64;
                    above += (pooled_above[s] as f64 / (k - 1.0))
                        * ((rel + epsilon) / (rel + nonrel + 2.0 * epsilon));
                }
            }
            let e_pk = 1.0 / k + ((k - 1.0) / k) * above;
            sum += e_pk / tj.strata()[idx].sampling_rate;
        }

        if let Some(s) = stratum {
            pooled_above[s] += 1;
            match judged {
                Some((_, true)) => rel_above[s] += 1,
                Some((_, false)) => nonrel_above[s] += 1,
                None => {}
            }
        }
    }

    InferredApScore {
        value: sum / r_hat,
        estimated_relevant: r_hat,
        flagged: false,
    }
}

/// Inferred precision and recall at a rank cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InferredPr {
    pub precision: f64,
    pub recall: f64,
    pub flagged: bool,
}

/// Estimates precision and recall at rank `k` from sampled judgments.
///
/// Each judged relevant shot in the top `k` stands for `1/rate` relevant
/// shots of its stratum: precision divides the estimated relevant count by
/// `k`, recall by the estimated relevant total. Precision is reported as
/// estimated — on an unlucky draw it can exceed 1; recall cannot.
pub fn inferred_precision_recall(
    entries: &[RunEntry],
    tj: &TopicJudgments,
    k: usize,
) -> InferredPr {
    let r_hat = tj.estimated_relevant();
    let mut estimated_relevant_at_k = 0.0;
    for entry in entries.iter().take(k) {
        if let Some((idx, true)) = tj.judgment_indexed(&entry.shot) {
            estimated_relevant_at_k += 1.0 / tj.strata()[idx].sampling_rate;
        }
    }
    if k == 0 || r_hat <= 0.0 {
        return InferredPr {
            precision: 0.0,
            recall: 0.0,
            flagged: true,
        };
    }
    InferredPr {
        precision: estimated_relevant_at_k / k as f64,
        recall: estimated_relevant_at_k / r_hat,
        flagged: false,
    }
}

/// Scores one run on every judged topic with the inferred-AP estimator,
/// labeling rows `xinfap`.
pub fn score_run_topics(
    run: &RankedRun,
    judgments: &StratifiedJudgments,
    epsilon: f64,
) -> RunScore {
    let mut topic_scores = Vec::new();
    for (topic, tj) in judgments.topics() {
        let (value, r_est, flagged) = match run.topic_entries(topic) {
            Some(entries) => {
                let s = extended_inferred_ap(entries, tj, epsilon);
                (s.value, s.estimated_relevant, s.flagged)
            }
            None => (0.0, tj.estimated_relevant(), true),
        };
        topic_scores.push(TopicScore {
            topic: topic.clone(),
            value,
            metric: "xinfap".to_owned(),
            n_relevant_est: r_est,
            flagged,
        });
    }
    let mean = if topic_scores.is_empty() {
        0.0
    } else {
        topic_scores.iter().map(|t| t.value).sum::<f64>() / topic_scores.len() as f64
    };
    RunScore {
        run_tag: run.run_tag.clone(),
        metric: "xinfap".to_owned(),
        mean,
        topic_scores,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{parse_judgments, parse_run};
    use crate::types::{TaskKind, TopicId};

    fn shots(names: &[&str]) -> Vec<ShotId> {
        names.iter().map(|n| ShotId::from(*n)).collect()
    }

    fn relevant(names: &[&str]) -> BTreeSet<ShotId> {
        names.iter().map(|n| ShotId::from(*n)).collect()
    }

    #[test]
    fn ap_hand_case_alternating() {
        // Ranked R N R N R with exactly those 3 relevant:
        // AP = (1/1 + 2/3 + 3/5) / 3.
        let ranked = shots(&["a", "b", "c", "d", "e"]);
        let rel = relevant(&["a", "c", "e"]);
        let expected = (1.0 + 2.0 / 3.0 + 3.0 / 5.0) / 3.0;
        assert!((average_precision(ranked.iter(), &rel) - expected).abs() < 1e-15);
    }

    #[test]
    fn ap_divides_by_all_relevant_not_just_retrieved() {
        let ranked = shots(&["a", "b"]);
        let rel = relevant(&["a", "x", "y", "z"]);
        assert!((average_precision(ranked.iter(), &rel) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ap_empty_relevant_set_scores_zero() {
        let ranked = shots(&["a", "b"]);
        assert_eq!(average_precision(ranked.iter(), &BTreeSet::new()), 0.0);
    }

    #[test]
    fn map_flags_topics_the_run_skipped_and_scores_them_zero() {
        let run = parse_run("1 Q0 a 1 0.9 r\n", TaskKind::Instance).unwrap();
        let qrels = "\
#stratum 1 s1 1 10 2
#stratum 2 s1 1 10 2
1 s1 a 1
1 s1 b 0
2 s1 c 1
2 s1 d 0
";
        let judgments = parse_judgments(qrels).unwrap();
        let score = mean_average_precision(&run, &judgments);
        assert_eq!(score.topic_scores.len(), 2);
        let t2 = score
            .topic_scores
            .iter()
            .find(|t| t.topic == TopicId::from("2"))
            .unwrap();
        assert_eq!(t2.value, 0.0);
        assert!(t2.flagged);
        assert!((score.mean - 0.5).abs() < 1e-15); // (1.0 + 0.0) / 2
    }

    /// Fully judged single stratum at rate 1.0: the estimator must agree
    /// with exact AP (the smoothing constant only perturbs at ~1e-7 here).
    #[test]
    fn inferred_ap_collapses_to_exact_ap_when_fully_judged() {
        let run_text = "\
1 Q0 a 1 0.9 r
1 Q0 b 2 0.8 r
1 Q0 c 3 0.7 r
1 Q0 d 4 0.6 r
1 Q0 e 5 0.5 r
1 Q0 f 6 0.4 r
";
        let qrels = "\
#stratum 1 s1 1 6 6
1 s1 a 1
1 s1 b 0
1 s1 c 1
1 s1 d 0
1 s1 e 1
1 s1 f 0
";
        let run = parse_run(run_text, TaskKind::Adhoc).unwrap();
        let judgments = parse_judgments(qrels).unwrap();
        let tj = judgments.topic(&TopicId::from("1")).unwrap();
        let entries = run.topic_entries(&TopicId::from("1")).unwrap();
        let inferred = extended_inferred_ap(entries, tj, DEFAULT_EPSILON);
        let exact = (1.0 + 2.0 / 3.0 + 3.0 / 5.0) / 3.0;
        assert!((inferred.value - exact).abs() < 1e-6);
        assert!((inferred.estimated_relevant - 3.0).abs() < 1e-12);
    }

    /// Two strata with rates 1.0 and 0.5; small enough to hand-evaluate.
    ///
    /// R^ = 1/1 + 1/0.5 = 3. The relevant shot at rank 1 contributes 1.
    /// The relevant shot at rank 3 sees two judged stratum-1 shots above
    /// it (one relevant), so E[P@3] = 1/3 + (2/3)*(2/2)*(1/2) = 2/3 and it
    /// contributes (1/0.5)*(2/3) = 4/3. Total: (1 + 4/3)/3 = 7/9.
    #[test]
    fn inferred_ap_two_strata_hand_case() {
        let run_text = "\
1 Q0 a 1 0.9 r
1 Q0 b 2 0.8 r
1 Q0 c 3 0.7 r
1 Q0 d 4 0.6 r
";
        let qrels = "\
#stratum 1 top 1 2 2
#stratum 1 bottom 3 4 2
1 top a 1
1 top b 0
1 bottom c 1
";
        let run = parse_run(run_text, TaskKind::Adhoc).unwrap();
        let judgments = parse_judgments(qrels).unwrap();
        let tj = judgments.topic(&TopicId::from("1")).unwrap();
        let entries = run.topic_entries(&TopicId::from("1")).unwrap();
        let inferred = extended_inferred_ap(entries, tj, DEFAULT_EPSILON);
        assert!((inferred.value - 7.0 / 9.0).abs() < 1e-4);
        assert!((inferred.estimated_relevant - 3.0).abs() < 1e-12);
    }

    #[test]
    fn inferred_ap_flags_topics_without_judged_relevant() {
        let run = parse_run("1 Q0 a 1 0.9 r\n", TaskKind::Adhoc).unwrap();
        let qrels = "#stratum 1 s1 1 10 5\n1 s1 a 0\n1 s1 b 0\n";
        let judgments = parse_judgments(qrels).unwrap();
        let tj = judgments.topic(&TopicId::from("1")).unwrap();
        let s = extended_inferred_ap(run.topic_entries(&TopicId::from("1")).unwrap(), tj, 1e-5);
        assert_eq!(s.value, 0.0);
        assert!(s.flagged);
    }

    #[test]
    fn inferred_precision_examples() {
        // Full sampling, 3 relevant in the top 10: P@10 = 0.3.
        let mut run_text = String::new();
        for i in 1..=10 {
            run_text.push_str(&format!("1 Q0 s{i} {i} {} r\n", 1.0 - i as f64 / 100.0));
        }
        let mut qrels = String::from("#stratum 1 s1 1 10 10\n");
        for i in 1..=10 {
            qrels.push_str(&format!("1 s1 s{i} {}\n", if i <= 3 { 1 } else { 0 }));
        }
        let run = parse_run(&run_text, TaskKind::Adhoc).unwrap();
        let judgments = parse_judgments(&qrels).unwrap();
        let tj = judgments.topic(&TopicId::from("1")).unwrap();
        let entries = run.topic_entries(&TopicId::from("1")).unwrap();
        let pr = inferred_precision_recall(entries, tj, 10);
        assert!((pr.precision - 0.3).abs() < 1e-12);
        assert!((pr.recall - 1.0).abs() < 1e-12);

        // One stratum at rate 0.5 (4 judged of pool 8), 2 judged relevant
        // in the top 10: estimated 4 relevant there, P@10 = 0.4.
        let qrels_half = "\
#stratum 1 s1 1 20 8
1 s1 s1 1
1 s1 s2 1
1 s1 s3 0
1 s1 s4 0
";
        let judgments = parse_judgments(qrels_half).unwrap();
        let tj = judgments.topic(&TopicId::from("1")).unwrap();
        let pr = inferred_precision_recall(entries, tj, 10);
        assert!((pr.precision - 0.4).abs() < 1e-12);
        // R^ = 2 / 0.5 = 4, all estimated relevant inside the top 10.
        assert!((pr.recall - 1.0).abs() < 1e-12);
    }
}
