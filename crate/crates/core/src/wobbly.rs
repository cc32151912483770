//! The Wobbly Center partitioner.
//!
//! Rows are dealt into `k` clusters so that each cluster soaks up as much of
//! the population's spread as possible:
//!
//! 1. The population mean `M` is computed once. The `k` rows nearest to `M`
//!    seed `C_1..C_k`, in that order.
//! 2. Clusters then take turns: on its turn, cluster `C_i` receives the
//!    remaining row farthest from its current centroid, and the centroid
//!    moves ("wobbles") to include it.
//! 3. The loop ends as soon as no rows remain, possibly mid-round.
//!
//! Nearest/farthest ties are resolved in favour of the lowest row index,
//! with ties defined as exact equality of squared Euclidean distances. The
//! result is a pure function of the dataset and `k`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::partition::{check_k, Method, Partition, PartitionError};
use crate::preprocess::stable_sum;

/// Largest absolute column mean tolerated by the standardized-input check.
pub const STANDARDIZED_MEAN_TOLERANCE: f64 = 1e-6;

/// How to react when the input does not look z-scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputCheck {
    Off,
    #[default]
    Warn,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WobblyOptions {
    pub k: usize,
    pub trace: bool,
    pub input_check: InputCheck,
}

impl WobblyOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            trace: false,
            input_check: InputCheck::default(),
        }
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn with_input_check(mut self, check: InputCheck) -> Self {
        self.input_check = check;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Cluster size right after the append this entry records (1 = seed).
    pub iteration: usize,
    pub centroid: Vec<f64>,
    pub dist_to_population_mean: f64,
}

/// Centroid history of every cluster, one entry per append.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub population_mean: Vec<f64>,
    pub clusters: Vec<Vec<TraceEntry>>,
}

impl ConvergenceTrace {
    /// Long-form CSV: `cluster,iteration,dim,centroid_value,dist_to_pop_mean`.
    /// Clusters are numbered from 1, dimensions from 0.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "cluster,iteration,dim,centroid_value,dist_to_pop_mean")?;
        for (c, entries) in self.clusters.iter().enumerate() {
            for e in entries {
                for (dim, v) in e.centroid.iter().enumerate() {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        c + 1,
                        e.iteration,
                        dim,
                        v,
                        e.dist_to_population_mean
                    )?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WobblyOutput {
    pub partition: Partition,
    pub trace: Option<ConvergenceTrace>,
}

/// Arithmetic mean of all rows.
pub fn population_mean(d: &Dataset) -> Vec<f64> {
    let n = d.n_rows() as f64;
    (0..d.n_cols())
        .map(|j| stable_sum(d.rows().map(|r| r[j])) / n)
        .collect()
}

#[inline]
fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Clone, Copy)]
enum Extreme {
    Nearest,
    Farthest,
}

/// Position within `available` of the extreme row. Exact ties go to the
/// lowest row index, wherever it sits in `available`.
fn extreme_position(d: &Dataset, available: &[usize], target: &[f64], which: Extreme) -> usize {
    let mut best_pos = 0;
    let mut best_idx = available[0];
    let mut best = squared_distance(d.row(best_idx), target);
    for (pos, &idx) in available.iter().enumerate().skip(1) {
        let dist = squared_distance(d.row(idx), target);
        let better = match which {
            Extreme::Nearest => dist < best,
            Extreme::Farthest => dist > best,
        };
        if better || (dist == best && idx < best_idx) {
            best = dist;
            best_idx = idx;
            best_pos = pos;
        }
    }
    best_pos
}

fn check_query(d: &Dataset, available: &[usize], target: &[f64]) -> Result<(), PartitionError> {
    if available.is_empty() {
        return Err(PartitionError::EmptyAvailable);
    }
    if target.len() != d.n_cols() {
        return Err(PartitionError::DimensionMismatch {
            expected: d.n_cols(),
            found: target.len(),
        });
    }
    if let Some(&index) = available.iter().find(|&&i| i >= d.n_rows()) {
        return Err(PartitionError::RowOutOfRange {
            index,
            n_rows: d.n_rows(),
        });
    }
    Ok(())
}

/// Row in `available` closest to `target`.
pub fn nearest_row(
    d: &Dataset,
    available: &[usize],
    target: &[f64],
) -> Result<usize, PartitionError> {
    check_query(d, available, target)?;
    Ok(available[extreme_position(d, available, target, Extreme::Nearest)])
}

/// Row in `available` farthest from `target`.
pub fn farthest_row(
    d: &Dataset,
    available: &[usize],
    target: &[f64],
) -> Result<usize, PartitionError> {
    check_query(d, available, target)?;
    Ok(available[extreme_position(d, available, target, Extreme::Farthest)])
}

/// Takes `k` rows in order of increasing distance to the population mean.
fn take_seeds(d: &Dataset, pool: &mut Vec<usize>, mean: &[f64], k: usize) -> Vec<usize> {
    (0..k)
        .map(|_| {
            let pos = extreme_position(d, pool, mean, Extreme::Nearest);
            pool.remove(pos)
        })
        .collect()
}

/// The `k` seed rows; the `i`-th seeds cluster `i`. The mean is not
/// recomputed as seeds are removed.
pub fn select_seeds(d: &Dataset, k: usize) -> Result<Vec<usize>, PartitionError> {
    check_k(k, 1, d.n_rows())?;
    let mean = population_mean(d);
    let mut pool: Vec<usize> = (0..d.n_rows()).collect();
    Ok(take_seeds(d, &mut pool, &mean, k))
}

fn check_standardized(d: &Dataset, mode: InputCheck) -> Result<(), PartitionError> {
    if mode == InputCheck::Off {
        return Ok(());
    }
    let mean = population_mean(d);
    let Some((j, &m)) = mean
        .iter()
        .enumerate()
        .find(|(_, m)| m.abs() > STANDARDIZED_MEAN_TOLERANCE)
    else {
        return Ok(());
    };
    let column = d.column_names()[j].clone();
    match mode {
        InputCheck::Strict => Err(PartitionError::NotStandardized { column, mean: m }),
        _ => {
            log::warn!(
                "column {column:?} has mean {m:e}; the partitioner is scale sensitive and expects z-scored input"
            );
            Ok(())
        }
    }
}

/// Running sum of a cluster's rows, so each centroid update costs O(d).
/// Rows are added in insertion order starting from zero, which makes
/// `sum / count` bit-identical to summing the members from scratch.
struct Centroid {
    sum: Vec<f64>,
    count: usize,
    mean: Vec<f64>,
}

impl Centroid {
    fn new(dim: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            count: 0,
            mean: vec![0.0; dim],
        }
    }

    fn push(&mut self, row: &[f64]) {
        self.count += 1;
        let n = self.count as f64;
        for ((s, m), x) in self.sum.iter_mut().zip(self.mean.iter_mut()).zip(row) {
            *s += x;
            *m = *s / n;
        }
    }
}

/// Partitions `d` into `k` clusters with the library's default input check
/// (warn when the data does not look standardized).
pub fn wobbly_partition(
    d: &Dataset,
    k: usize,
    trace: bool,
) -> Result<WobblyOutput, PartitionError> {
    wobbly_partition_with(d, &WobblyOptions::new(k).with_trace(trace))
}

pub fn wobbly_partition_with(
    d: &Dataset,
    opts: &WobblyOptions,
) -> Result<WobblyOutput, PartitionError> {
    let k = opts.k;
    check_k(k, 2, d.n_rows())?;
    check_standardized(d, opts.input_check)?;

    let dim = d.n_cols();
    let mean = population_mean(d);
    let mut pool: Vec<usize> = (0..d.n_rows()).collect();
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut centroids: Vec<Centroid> = (0..k).map(|_| Centroid::new(dim)).collect();
    let mut trace: Option<Vec<Vec<TraceEntry>>> = opts.trace.then(|| vec![Vec::new(); k]);

    let mut append =
        |c: usize, row: usize, clusters: &mut Vec<Vec<usize>>, centroids: &mut Vec<Centroid>| {
            clusters[c].push(row);
            centroids[c].push(d.row(row));
            if let Some(t) = trace.as_mut() {
                let centroid = centroids[c].mean.clone();
                let dist = squared_distance(&centroid, &mean).sqrt();
                t[c].push(TraceEntry {
                    iteration: centroids[c].count,
                    centroid,
                    dist_to_population_mean: dist,
                });
            }
        };

    for (c, row) in take_seeds(d, &mut pool, &mean, k).into_iter().enumerate() {
        append(c, row, &mut clusters, &mut centroids);
    }

    'rounds: loop {
        for c in 0..k {
            if pool.is_empty() {
                break 'rounds;
            }
            let pos = extreme_position(d, &pool, &centroids[c].mean, Extreme::Farthest);
            let row = pool.remove(pos);
            append(c, row, &mut clusters, &mut centroids);
        }
    }

    let partition = Partition {
        method: Method::Wobbly,
        k,
        seed: None,
        source_n: d.n_rows(),
        clusters,
    };
    Ok(WobblyOutput {
        partition,
        trace: trace.map(|clusters| ConvergenceTrace {
            population_mean: mean,
            clusters,
        }),
    })
}
