//! Deterministic anti-clustering of tabular data into `k` mutually
//! representative samples, plus the statistics used to check them.
//!
//! The pipeline is: [`dataset::load_csv`] → [`preprocess::standardize`] →
//! [`wobbly::wobbly_partition`] (or [`baseline::random_partition`]) →
//! [`stats::evaluate_partition`].

pub mod baseline;
pub mod dataset;
pub mod harness;
pub mod partition;
pub mod preprocess;
pub mod stats;
pub mod wobbly;

pub use baseline::{random_partition, RngSeed};
pub use dataset::{load_csv, Dataset, IngestOptions, LoadReport, NaPolicy};
pub use partition::{Method, Partition, PartitionError};
pub use preprocess::{apply_params, standardize, StandardizationParams};
pub use stats::{evaluate_partition, evaluate_vs_population, AnovaConfig, AnovaReport};
pub use wobbly::{wobbly_partition, wobbly_partition_with, ConvergenceTrace, WobblyOptions};
