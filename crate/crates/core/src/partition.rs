//! Assignment of dataset rows to `k` disjoint clusters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Wobbly,
    Random,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Wobbly => "wobbly",
            Method::Random => "random",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("k = {k} is out of range; expected {min} <= k <= {max}")]
    KOutOfRange { k: usize, min: usize, max: usize },
    #[error("no candidate rows available")]
    EmptyAvailable,
    #[error("row index {index} out of range for {n_rows} rows")]
    RowOutOfRange { index: usize, n_rows: usize },
    #[error("target has {found} dimensions, dataset has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("input does not look standardized: column {column:?} has mean {mean:e}")]
    NotStandardized { column: String, mean: f64 },
    #[error("partition covers {partition} rows but the dataset has {dataset}")]
    SourceMismatch { partition: usize, dataset: usize },
    #[error("partition declares k = {declared} but lists {found} clusters")]
    ClusterCount { declared: usize, found: usize },
    #[error("row {0} appears in more than one cluster")]
    Duplicate(usize),
    #[error("row {0} is not assigned to any cluster")]
    Unassigned(usize),
}

/// Clusters `C_1..C_k` as ordered lists of row indices, in insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub method: Method,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub source_n: usize,
    pub clusters: Vec<Vec<usize>>,
}

impl Partition {
    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// Cluster label (0-based) of every row, or `None` if a row is unassigned.
    pub fn labels(&self) -> Vec<Option<usize>> {
        let mut labels = vec![None; self.source_n];
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                if let Some(slot) = labels.get_mut(i) {
                    *slot = Some(c);
                }
            }
        }
        labels
    }

    /// Checks that the clusters are disjoint, cover `0..n_rows` exactly, and
    /// that the declared metadata agrees with the contents.
    pub fn validate(&self, n_rows: usize) -> Result<(), PartitionError> {
        if self.source_n != n_rows {
            return Err(PartitionError::SourceMismatch {
                partition: self.source_n,
                dataset: n_rows,
            });
        }
        if self.clusters.len() != self.k {
            return Err(PartitionError::ClusterCount {
                declared: self.k,
                found: self.clusters.len(),
            });
        }
        let mut seen = vec![false; n_rows];
        for &i in self.clusters.iter().flatten() {
            if i >= n_rows {
                return Err(PartitionError::RowOutOfRange { index: i, n_rows });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(PartitionError::Duplicate(i));
            }
        }
        match seen.iter().position(|s| !s) {
            Some(i) => Err(PartitionError::Unassigned(i)),
            None => Ok(()),
        }
    }

    /// Sizes differ by at most one and never increase with cluster index.
    pub fn is_balanced(&self) -> bool {
        let sizes = self.sizes();
        let (Some(max), Some(min)) = (sizes.iter().max(), sizes.iter().min()) else {
            return true;
        };
        max - min <= 1 && sizes.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }
}

pub(crate) fn check_k(k: usize, min: usize, n_rows: usize) -> Result<(), PartitionError> {
    if k < min || k > n_rows {
        return Err(PartitionError::KOutOfRange {
            k,
            min,
            max: n_rows,
        });
    }
    Ok(())
}
