//! Pearson correlation between metric score vectors.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PearsonError {
    /// Correlation is undefined for a constant vector.
    #[error("metric {0} has zero variance")]
    ZeroVariance(String),
    /// The vectors pair up by position, so they must agree in length.
    #[error("metric {metric} has {got} values, expected {expected}")]
    LengthMismatch {
        metric: String,
        expected: usize,
        got: usize,
    },
    /// At least two observations are needed.
    #[error("need at least 2 paired values, got {0}")]
    TooShort(usize),
}

/// All-pairs correlations, aligned with `labels`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// Symmetric with unit diagonal.
    pub values: Vec<Vec<f64>>,
}

/// Pearson's r between two equal-length vectors.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, PearsonError> {
    if x.len() != y.len() {
        return Err(PearsonError::LengthMismatch {
            metric: String::from("y"),
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(PearsonError::TooShort(x.len()));
    }
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in x.iter().zip(y) {
        cov += (a - mean_x) * (b - mean_y);
        var_x += (a - mean_x).powi(2);
        var_y += (b - mean_y).powi(2);
    }
    if var_x == 0.0 {
        return Err(PearsonError::ZeroVariance(String::from("x")));
    }
    if var_y == 0.0 {
        return Err(PearsonError::ZeroVariance(String::from("y")));
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Correlates every pair of labeled score vectors.
///
/// All vectors must have the same length (scores for the same systems in
/// the same order), at least 2 entries, and nonzero variance.
pub fn pearson_matrix(series: &[(String, Vec<f64>)]) -> Result<CorrelationMatrix, PearsonError> {
    let Some((_, first)) = series.first() else {
        return Ok(CorrelationMatrix {
            labels: Vec::new(),
            values: Vec::new(),
        });
    };
    let expected = first.len();
    if expected < 2 {
        return Err(PearsonError::TooShort(expected));
    }
    for (label, values) in series {
        if values.len() != expected {
            return Err(PearsonError::LengthMismatch {
                metric: label.clone(),
                expected,
                got: values.len(),
            });
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if values.iter().all(|v| *v == mean) {
            return Err(PearsonError::ZeroVariance(label.clone()));
        }
    }

    let n = series.len();
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = pearson(&series[i].1, &series[j].1)?;
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(CorrelationMatrix {
        labels: series.iter().map(|(l, _)| l.clone()).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_with_itself_is_one() {
        let v = vec![0.3, 0.1, 0.9, 0.5];
        assert!((pearson(&v, &v).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_linear_relation_is_one() {
        assert!(
            (pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn perfect_inverse_relation_is_minus_one() {
        assert!(
            (pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn constant_vector_is_rejected() {
        assert_eq!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            PearsonError::ZeroVariance(String::from("x"))
        );
    }

    #[test]
    fn matrix_is_symmetric_with_unit_diagonal() {
        let series = vec![
            (String::from("m1"), vec![0.1, 0.5, 0.9, 0.2]),
            (String::from("m2"), vec![0.2, 0.4, 0.8, 0.3]),
            (String::from("m3"), vec![0.9, 0.2, 0.1, 0.6]),
        ];
        let m = pearson_matrix(&series).unwrap();
        assert_eq!(m.labels, vec!["m1", "m2", "m3"]);
        for i in 0..3 {
            assert_eq!(m.values[i][i], 1.0);
            for j in 0..3 {
                assert_eq!(m.values[i][j], m.values[j][i]);
            }
        }
    }

    #[test]
    fn ragged_series_are_rejected_by_label() {
        let series = vec![
            (String::from("m1"), vec![0.1, 0.5, 0.9]),
            (String::from("m2"), vec![0.2, 0.4]),
        ];
        assert_eq!(
            pearson_matrix(&series).unwrap_err(),
            PearsonError::LengthMismatch {
                metric: String::from("m2"),
                expected: 3,
                got: 2,
            }
        );
    }
}
