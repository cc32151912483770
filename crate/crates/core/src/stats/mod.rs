//! One-way ANOVA with exact F-distribution p-values, the pooled two-sample
//! t-test, and per-feature evaluation of a partition.

mod anova;
pub mod report;
pub mod special;

use thiserror::Error;

pub use anova::{one_way_anova, t_test_two_sample, AnovaResult, TTestResult};
pub use report::{
    evaluate_partition, evaluate_vs_population, format_sig, AnovaConfig, AnovaReport,
    FeatureOutcome, FeatureTest, Hypothesis, Verdict,
};
pub use special::{f_sf, ln_beta, ln_gamma, reg_inc_beta, t_sf_two_sided};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("continued fraction did not converge for a={a}, b={b}, x={x}")]
    NoConvergence { a: f64, b: f64, x: f64 },
    #[error("need at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("group {0} is too small")]
    GroupTooSmall(usize),
    #[error("{observations} observations are too few for {groups} groups")]
    TooFewObservations { observations: usize, groups: usize },
    #[error("non-finite observation in group {0}")]
    NonFinite(usize),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("partition does not match dataset: {0}")]
    PartitionMismatch(String),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
}
