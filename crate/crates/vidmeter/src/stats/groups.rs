//! All-pairs significance testing and the indentation layout.
//!
//! Runs are ordered by mean score and every pair is tested; the layout
//! then walks down the ranking greedily, keeping a run in the current
//! group while no member of the group differs from it significantly.
//! Each new group is indented one level deeper and tagged with the next
//! symbol, so two runs printed at the same indentation are statistically
//! indistinguishable at the chosen alpha.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::randomization::{paired_differences, randomization_test, RandomizationError};
use crate::types::{RunTag, TopicId};

/// Symbols assigned to successive groups, reused cyclically.
const GROUP_SYMBOLS: [char; 8] = ['*', '#', '!', '@', '+', '^', '~', '%'];

/// Pairwise p-values over a set of runs, ordered by mean score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignificanceMatrix {
    /// Runs sorted by mean score descending (ties by tag ascending).
    pub runs: Vec<RunTag>,
    /// Mean per-topic score of each run, aligned with `runs`.
    pub means: Vec<f64>,
    /// Symmetric p-value matrix aligned with `runs`; diagonal is 1.
    pub p_values: Vec<Vec<f64>>,
    pub alpha: f64,
}

impl SignificanceMatrix {
    /// Whether runs `i` and `j` differ significantly at `alpha`.
    pub fn significant(&self, i: usize, j: usize) -> bool {
        self.p_values[i][j] < self.alpha
    }
}

/// One indistinguishability group in the layout.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignificanceGroup {
    /// Indentation level, 0 for the top group.
    pub indent: usize,
    /// The group's cyclically assigned marker.
    pub symbol: char,
    /// Members in ranking order.
    pub members: Vec<RunTag>,
}

/// Runs the randomization test on every pair of runs.
///
/// Each pair gets its own seed (`seed` XOR the pair's linear index), so
/// the matrix is reproducible no matter how the pairs are scheduled; the
/// pairs are evaluated in parallel.
pub fn significance_matrix(
    scores: &BTreeMap<RunTag, BTreeMap<TopicId, f64>>,
    iterations: u64,
    seed: u64,
    alpha: f64,
) -> Result<SignificanceMatrix, RandomizationError> {
    let mut runs: Vec<&RunTag> = scores.keys().collect();
    let mean = |tag: &RunTag| -> f64 {
        let topic_scores = &scores[tag];
        if topic_scores.is_empty() {
            0.0
        } else {
            topic_scores.values().sum::<f64>() / topic_scores.len() as f64
        }
    };
    runs.sort_by(|a, b| {
        mean(b)
            .partial_cmp(&mean(a))
            .expect("finite scores")
            .then_with(|| a.cmp(b))
    });

    // Fail fast on mismatched topic sets so the parallel stage cannot.
    for pair in runs.windows(2) {
        paired_differences(&scores[pair[0]], &scores[pair[1]])?;
    }

    let n = runs.len();
    let mut index_pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            index_pairs.push((i, j));
        }
    }
    let pair_ps: Vec<f64> = index_pairs
        .par_iter()
        .enumerate()
        .map(|(pair_index, &(i, j))| {
            randomization_test(
                &scores[runs[i]],
                &scores[runs[j]],
                iterations,
                seed ^ pair_index as u64,
            )
            .expect("topic sets verified above")
        })
        .collect();

    let mut p_values = vec![vec![1.0; n]; n];
    for (&(i, j), p) in index_pairs.iter().zip(pair_ps) {
        p_values[i][j] = p;
        p_values[j][i] = p;
    }
    Ok(SignificanceMatrix {
        means: runs.iter().map(|t| mean(t)).collect(),
        runs: runs.into_iter().cloned().collect(),
        p_values,
        alpha,
    })
}

/// Partitions the ranked runs into indentation groups.
///
/// Walking the ranking from the top, a run stays in the current group
/// only while it is indistinguishable (p ≥ alpha) from *every* member;
/// the first significant difference closes the group and opens a deeper
/// one.
pub fn significance_groups(matrix: &SignificanceMatrix) -> Vec<SignificanceGroup> {
    let mut groups: Vec<SignificanceGroup> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for i in 0..matrix.runs.len() {
        if current.iter().any(|&m| matrix.significant(m, i)) {
            push_group(matrix, &mut groups, &current);
            current.clear();
        }
        current.push(i);
    }
    if !current.is_empty() {
        push_group(matrix, &mut groups, &current);
    }
    groups
}

fn push_group(
    matrix: &SignificanceMatrix,
    groups: &mut Vec<SignificanceGroup>,
    members: &[usize],
) {
    let indent = groups.len();
    groups.push(SignificanceGroup {
        indent,
        symbol: GROUP_SYMBOLS[indent % GROUP_SYMBOLS.len()],
        members: members.iter().map(|&i| matrix.runs[i].clone()).collect(),
    });
}

/// Renders groups as indented plain text, one run per line.
pub fn layout_text(groups: &[SignificanceGroup]) -> String {
    let mut out = String::new();
    for group in groups {
        for member in &group.members {
            out.push_str(&"  ".repeat(group.indent));
            out.push(group.symbol);
            out.push(' ');
            out.push_str(member.as_str());
            out.push('\n');
        }
    }
    out
}
