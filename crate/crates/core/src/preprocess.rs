//! Z-score standardization.
//!
//! Each column is mapped through `(x - mean) / std`, where `std` is the
//! population standard deviation (divisor `n`).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("constant column {0:?}: standard deviation is zero")]
    ConstantColumn(String),
    #[error("cannot standardize a single-row dataset")]
    SingleRow,
    #[error("parameters cover {params} columns but the dataset has {data}")]
    DimensionMismatch { params: usize, data: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Per-column location and scale of a z-score transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl StandardizationParams {
    pub fn identity(n_cols: usize) -> Self {
        Self {
            means: vec![0.0; n_cols],
            stds: vec![1.0; n_cols],
        }
    }

    pub fn n_cols(&self) -> usize {
        self.means.len()
    }

    fn validate(&self) -> Result<(), PreprocessError> {
        if self.means.len() != self.stds.len() {
            return Err(PreprocessError::InvalidParams(format!(
                "{} means but {} stds",
                self.means.len(),
                self.stds.len()
            )));
        }
        if let Some(s) = self.stds.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(PreprocessError::InvalidParams(format!(
                "standard deviation {s} is not a positive finite number"
            )));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(PreprocessError::InvalidParams("non-finite mean".into()));
        }
        Ok(())
    }
}

/// Compensated (Neumaier) sum.
pub(crate) fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Two-pass mean and population standard deviation of one column.
pub(crate) fn mean_and_pop_std(col: &[f64]) -> (f64, f64) {
    let n = col.len() as f64;
    let mean0 = stable_sum(col.iter().copied()) / n;
    // second pass corrects the residual error of the first
    let mean = mean0 + stable_sum(col.iter().map(|x| x - mean0)) / n;
    let var = stable_sum(col.iter().map(|x| (x - mean) * (x - mean))) / n;
    (mean, var.sqrt())
}

fn columns(d: &Dataset) -> Vec<Vec<f64>> {
    (0..d.n_cols())
        .map(|j| d.rows().map(|r| r[j]).collect())
        .collect()
}

/// Standardizes every column and returns the parameters that were used.
pub fn standardize(d: &Dataset) -> Result<(Dataset, StandardizationParams), PreprocessError> {
    if d.n_rows() < 2 {
        return Err(PreprocessError::SingleRow);
    }
    let mut means = Vec::with_capacity(d.n_cols());
    let mut stds = Vec::with_capacity(d.n_cols());
    for (j, col) in columns(d).iter().enumerate() {
        let (mean, std) = mean_and_pop_std(col);
        let first = col[0];
        if std == 0.0 || !std.is_finite() || col.iter().all(|&v| v == first) {
            return Err(PreprocessError::ConstantColumn(d.column_names()[j].clone()));
        }
        means.push(mean);
        stds.push(std);
    }
    let params = StandardizationParams { means, stds };
    let out = apply_params(d, &params)?;
    Ok((out, params))
}

/// Applies stored parameters to a dataset with the same column layout.
pub fn apply_params(d: &Dataset, p: &StandardizationParams) -> Result<Dataset, PreprocessError> {
    p.validate()?;
    if p.n_cols() != d.n_cols() {
        return Err(PreprocessError::DimensionMismatch {
            params: p.n_cols(),
            data: d.n_cols(),
        });
    }
    let values = d
        .rows()
        .flat_map(|row| {
            row.iter()
                .zip(p.means.iter().zip(&p.stds))
                .map(|(x, (m, s))| (x - m) / s)
        })
        .collect();
    Ok(d.with_values(values))
}

/// Largest absolute column mean and largest deviation of a column's
/// population standard deviation from 1.
pub fn standardization_residuals(d: &Dataset) -> (f64, f64) {
    columns(d).iter().fold((0.0_f64, 0.0_f64), |(m, s), col| {
        let (mean, std) = mean_and_pop_std(col);
        (m.max(mean.abs()), s.max((std - 1.0).abs()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn col(values: &[f64]) -> Dataset {
        Dataset::from_unnamed_rows(values.iter().map(|&v| vec![v]).collect()).unwrap()
    }

    #[test]
    fn standardizes_two_four_six() {
        let (out, p) = standardize(&col(&[2.0, 4.0, 6.0])).unwrap();
        assert_abs_diff_eq!(p.means[0], 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.stds[0], (8.0_f64 / 3.0).sqrt(), epsilon = 1e-15);
        let z = out.column_slice(0).unwrap();
        for (got, want) in z.iter().zip([-1.224744871391589, 0.0, 1.224744871391589]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn standardizes_symmetric_unit_column() {
        let (out, p) = standardize(&col(&[-1.0, 0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(p.means[0], 0.0);
        assert_abs_diff_eq!(p.stds[0], (2.0_f64 / 3.0).sqrt(), epsilon = 1e-15);
        let z = out.column_slice(0).unwrap();
        assert_abs_diff_eq!(z[0], -1.224744871391589, epsilon = 1e-12);
        assert_abs_diff_eq!(z[2], 1.224744871391589, epsilon = 1e-12);
    }

    #[test]
    fn constant_column_is_named_in_error() {
        let d = Dataset::from_rows(
            vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]],
            vec!["ok".into(), "flat".into()],
        )
        .unwrap();
        assert_eq!(
            standardize(&d).unwrap_err(),
            PreprocessError::ConstantColumn("flat".into())
        );
    }

    #[test]
    fn single_row_is_rejected() {
        assert_eq!(
            standardize(&col(&[3.0])).unwrap_err(),
            PreprocessError::SingleRow
        );
    }

    #[test]
    fn apply_params_cases() {
        let d = col(&[2.0, 4.0, 6.0]);
        let (z, p) = standardize(&d).unwrap();
        assert_eq!(apply_params(&d, &p).unwrap(), z);

        assert_eq!(
            apply_params(&d, &StandardizationParams::identity(1)).unwrap(),
            d
        );

        let p = StandardizationParams {
            means: vec![4.0],
            stds: vec![2.0],
        };
        assert_eq!(
            apply_params(&d, &p).unwrap().column_slice(0).unwrap(),
            vec![-1.0, 0.0, 1.0]
        );
    }

    #[test]
    fn apply_params_errors() {
        let d = col(&[1.0, 2.0]);
        assert!(matches!(
            apply_params(&d, &StandardizationParams::identity(2)),
            Err(PreprocessError::DimensionMismatch { params: 2, data: 1 })
        ));
        let bad = StandardizationParams {
            means: vec![0.0],
            stds: vec![0.0],
        };
        assert!(matches!(
            apply_params(&d, &bad),
            Err(PreprocessError::InvalidParams(_))
        ));
    }

    #[test]
    fn params_json_shape() {
        let p = StandardizationParams {
            means: vec![4.0],
            stds: vec![2.0],
        };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"means":[4.0],"stds":[2.0]}"#);
        let back: StandardizationParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn stable_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(stable_sum(v), 2.0);
    }
}
