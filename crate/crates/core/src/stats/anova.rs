use serde::{Deserialize, Serialize};

use super::special::{f_sf, t_sf_two_sided};
use super::StatsError;
use crate::preprocess::stable_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub f_stat: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t_stat: f64,
    pub df: usize,
    pub p_two_sided: f64,
}

fn mean(values: &[f64]) -> f64 {
    stable_sum(values.iter().copied()) / values.len() as f64
}

fn sum_sq_dev(values: &[f64], center: f64) -> f64 {
    stable_sum(values.iter().map(|x| (x - center) * (x - center)))
}

fn check_groups<G: AsRef<[f64]>>(groups: &[G], min_size: usize) -> Result<usize, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    let mut total = 0;
    for (g, values) in groups.iter().enumerate() {
        let values = values.as_ref();
        if values.len() < min_size {
            return Err(StatsError::GroupTooSmall(g));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite(g));
        }
        total += values.len();
    }
    Ok(total)
}

/// One-way ANOVA across `groups` (each non-empty).
///
/// `F = (SS_between / (k - 1)) / (SS_within / (N - k))` with the p-value
/// taken from the upper tail of `F(k - 1, N - k)`. When every observation
/// is identical the statistic is 0/0 and [`StatsError::Degenerate`] is
/// returned. Zero within-group spread with distinct group means gives
/// `F = inf` and `p = 0`.
pub fn one_way_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult, StatsError> {
    let total = check_groups(groups, 1)?;
    let k = groups.len();
    if total <= k {
        return Err(StatsError::TooFewObservations {
            observations: total,
            groups: k,
        });
    }

    let first = groups[0].as_ref()[0];
    if groups
        .iter()
        .all(|g| g.as_ref().iter().all(|&v| v == first))
    {
        return Err(StatsError::Degenerate(
            "all observations are identical; F is 0/0".into(),
        ));
    }

    let grand = stable_sum(groups.iter().flat_map(|g| g.as_ref().iter().copied())) / total as f64;
    let mut between_terms = Vec::with_capacity(k);
    let mut within_terms = Vec::with_capacity(k);
    for g in groups {
        let values = g.as_ref();
        let m = mean(values);
        between_terms.push(values.len() as f64 * (m - grand) * (m - grand));
        within_terms.push(sum_sq_dev(values, m));
    }
    let ss_between = stable_sum(between_terms);
    let ss_within = stable_sum(within_terms);

    let df_between = k - 1;
    let df_within = total - k;
    let f_stat = if ss_within == 0.0 {
        f64::INFINITY
    } else {
        (ss_between / df_between as f64) / (ss_within / df_within as f64)
    };
    let p_value = f_sf(f_stat, df_between as f64, df_within as f64)?;
    Ok(AnovaResult {
        f_stat,
        df_between,
        df_within,
        p_value,
    })
}

/// Student's two-sample t-test with pooled (equal) variance.
pub fn t_test_two_sample(x: &[f64], y: &[f64]) -> Result<TTestResult, StatsError> {
    check_groups(&[x, y], 2)?;
    let (mx, my) = (mean(x), mean(y));
    let df = x.len() + y.len() - 2;
    let pooled = (sum_sq_dev(x, mx) + sum_sq_dev(y, my)) / df as f64;
    if pooled == 0.0 {
        return Err(StatsError::Degenerate("pooled variance is zero".into()));
    }
    let se = (pooled * (1.0 / x.len() as f64 + 1.0 / y.len() as f64)).sqrt();
    let t_stat = (mx - my) / se;
    Ok(TTestResult {
        t_stat,
        df,
        p_two_sided: t_sf_two_sided(t_stat, df as f64)?,
    })
}
