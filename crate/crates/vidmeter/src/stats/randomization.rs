//! Paired sign-flip randomization test.
//!
//! Under the null hypothesis that two runs are interchangeable, each
//! per-topic score difference is equally likely to carry either sign. The
//! test statistic is the absolute mean difference; the p-value is the
//! probability, over sign flips, of a statistic at least as large as the
//! observed one.
//!
//! With `T` topics there are `2^T` flip patterns. Up to
//! [`EXACT_ENUMERATION_LIMIT`] topics they are enumerated exhaustively
//! (the p-value is exact, a multiple of `2^-T`); beyond that a seeded
//! Monte Carlo sample is used with the standard add-one smoothing
//! `p = (1 + hits) / (1 + iterations)`, which never reports zero.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::types::TopicId;

/// Largest topic count scored by exhaustive enumeration.
pub const EXACT_ENUMERATION_LIMIT: usize = 20;

/// Slack when comparing a permuted statistic against the observed one, so
/// that the identity permutation always counts despite float rounding.
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum RandomizationError {
    /// The two runs were not scored on the same topics.
    #[error("runs scored on different topic sets (first difference: {0})")]
    TopicMismatch(TopicId),
}

/// Tests two runs' per-topic scores for a significant difference.
///
/// Chooses exhaustive enumeration when the topic count is at most
/// [`EXACT_ENUMERATION_LIMIT`], otherwise Monte Carlo with `iterations`
/// draws from the given seed. Identical score maps give p = 1.0.
pub fn randomization_test(
    a: &BTreeMap<TopicId, f64>,
    b: &BTreeMap<TopicId, f64>,
    iterations: u64,
    seed: u64,
) -> Result<f64, RandomizationError> {
    let diffs = paired_differences(a, b)?;
    if diffs.len() <= EXACT_ENUMERATION_LIMIT {
        Ok(exact_randomization_p(&diffs))
    } else {
        Ok(monte_carlo_randomization_p(&diffs, iterations, seed))
    }
}

/// Pairs the two maps topic by topic and returns `a − b` per topic, in
/// sorted topic order.
pub(crate) fn paired_differences(
    a: &BTreeMap<TopicId, f64>,
    b: &BTreeMap<TopicId, f64>,
) -> Result<Vec<f64>, RandomizationError> {
    if let Some(topic) = a
        .keys()
        .find(|t| !b.contains_key(*t))
        .or_else(|| b.keys().find(|t| !a.contains_key(*t)))
    {
        return Err(RandomizationError::TopicMismatch(topic.clone()));
    }
    Ok(a.iter().map(|(t, &va)| va - b[t]).collect())
}

/// Exact p-value over all `2^T` sign-flip patterns.
///
/// The returned value is `hits / 2^T` where hits counts patterns whose
/// absolute summed difference reaches the observed one; the identity
/// pattern always hits, so the result lies in `(0, 1]`.
pub fn exact_randomization_p(diffs: &[f64]) -> f64 {
    assert!(
        diffs.len() <= EXACT_ENUMERATION_LIMIT,
        "exhaustive enumeration over {} topics would need 2^{} patterns",
        diffs.len(),
        diffs.len()
    );
    // |mean| comparisons scale to |sum| comparisons (common divisor T).
    let observed: f64 = diffs.iter().sum::<f64>().abs();
    let t = diffs.len();
    let patterns: u64 = 1 << t;
    let mut hits = 0u64;
    for pattern in 0..patterns {
        let mut sum = 0.0;
        for (i, d) in diffs.iter().enumerate() {
            if pattern >> i & 1 == 1 {
                sum -= d;
            } else {
                sum += d;
            }
        }
        if sum.abs() >= observed - TIE_EPSILON {
            hits += 1;
        }
    }
    hits as f64 / patterns as f64
}

/// Monte Carlo p-value from `iterations` seeded sign-flip draws.
pub fn monte_carlo_randomization_p(diffs: &[f64], iterations: u64, seed: u64) -> f64 {
    assert!(iterations >= 1, "at least one iteration required");
    let observed: f64 = diffs.iter().sum::<f64>().abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..iterations {
        let sum: f64 = diffs
            .iter()
            .map(|d| if rng.gen::<bool>() { -d } else { *d })
            .sum();
        if sum.abs() >= observed - TIE_EPSILON {
            hits += 1;
        }
    }
    (1 + hits) as f64 / (1 + iterations) as f64
}
