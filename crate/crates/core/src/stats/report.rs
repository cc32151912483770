use std::io::Write;

use serde::{Deserialize, Serialize};

use super::anova::{one_way_anova, AnovaResult};
use super::StatsError;
use crate::dataset::Dataset;
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnovaConfig {
    pub alpha: f64,
}

impl AnovaConfig {
    pub fn new(alpha: f64) -> Result<Self, StatsError> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self { alpha })
        } else {
            Err(StatsError::InvalidAlpha(alpha))
        }
    }
}

impl Default for AnovaConfig {
    fn default() -> Self {
        Self { alpha: 0.05 }
    }
}

/// Which null hypothesis a report tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    /// The samples do not differ from one another.
    BetweenSamples,
    /// The samples do not differ from the population they were drawn from.
    SamplesVsPopulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Reject,
    FailToReject,
}

impl Verdict {
    pub fn from_p(p: f64, alpha: f64) -> Self {
        if p < alpha {
            Verdict::Reject
        } else {
            Verdict::FailToReject
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Reject => "reject",
            Verdict::FailToReject => "fail_to_reject",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeatureOutcome {
    Tested {
        result: AnovaResult,
        verdict: Verdict,
    },
    Degenerate {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureTest {
    pub attribute: String,
    #[serde(flatten)]
    pub outcome: FeatureOutcome,
}

impl FeatureTest {
    pub fn p_value(&self) -> Option<f64> {
        match &self.outcome {
            FeatureOutcome::Tested { result, .. } => Some(result.p_value),
            FeatureOutcome::Degenerate { .. } => None,
        }
    }

    pub fn verdict(&self) -> Option<Verdict> {
        match &self.outcome {
            FeatureOutcome::Tested { verdict, .. } => Some(*verdict),
            FeatureOutcome::Degenerate { .. } => None,
        }
    }
}

/// Per-feature ANOVA results, in column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaReport {
    pub hypothesis: Hypothesis,
    pub alpha: f64,
    pub features: Vec<FeatureTest>,
}

impl AnovaReport {
    pub fn p_values(&self) -> Vec<Option<f64>> {
        self.features.iter().map(FeatureTest::p_value).collect()
    }

    /// Smallest p-value over tested features.
    pub fn min_p(&self) -> Option<f64> {
        self.features
            .iter()
            .filter_map(FeatureTest::p_value)
            .min_by(f64::total_cmp)
    }

    pub fn rejections(&self) -> usize {
        self.count(Verdict::Reject)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.features
            .iter()
            .filter(|f| f.verdict() == Some(verdict))
            .count()
    }

    pub fn degenerate(&self) -> usize {
        self.features
            .iter()
            .filter(|f| f.verdict().is_none())
            .count()
    }

    /// CSV with columns `attribute,F,df1,df2,p,verdict`; numbers carry seven
    /// significant digits. Degenerate features leave the numeric cells empty.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "attribute,F,df1,df2,p,verdict")?;
        for f in &self.features {
            let attribute = csv_field(&f.attribute);
            match &f.outcome {
                FeatureOutcome::Tested { result, verdict } => writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    attribute,
                    format_sig(result.f_stat, 7),
                    result.df_between,
                    result.df_within,
                    format_sig(result.p_value, 7),
                    verdict.as_str()
                )?,
                FeatureOutcome::Degenerate { .. } => writeln!(w, "{attribute},,,,,degenerate")?,
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Formats `x` with `digits` significant digits, `%g`-style: plain decimal
/// for moderate magnitudes, scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn check_partition(d: &Dataset, p: &Partition) -> Result<(), StatsError> {
    p.validate(d.n_rows())
        .map_err(|e| StatsError::PartitionMismatch(e.to_string()))
}

fn small_cluster(p: &Partition) -> Option<usize> {
    p.clusters.iter().position(|c| c.len() < 2)
}

fn test_feature(
    attribute: &str,
    groups: &[Vec<f64>],
    small: Option<usize>,
    alpha: f64,
) -> FeatureTest {
    let outcome = match small {
        Some(c) => FeatureOutcome::Degenerate {
            reason: format!(
                "cluster {} has fewer than two rows; within-cluster variance is undefined",
                c + 1
            ),
        },
        None => match one_way_anova(groups) {
            Ok(result) => FeatureOutcome::Tested {
                verdict: Verdict::from_p(result.p_value, alpha),
                result,
            },
            Err(e) => FeatureOutcome::Degenerate {
                reason: e.to_string(),
            },
        },
    };
    FeatureTest {
        attribute: attribute.to_string(),
        outcome,
    }
}

fn evaluate(
    d: &Dataset,
    p: &Partition,
    cfg: &AnovaConfig,
    hypothesis: Hypothesis,
) -> Result<AnovaReport, StatsError> {
    AnovaConfig::new(cfg.alpha)?;
    check_partition(d, p)?;
    let small = small_cluster(p);
    let features = d
        .column_names()
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let mut groups: Vec<Vec<f64>> = p
                .clusters
                .iter()
                .map(|members| members.iter().map(|&i| d.row(i)[j]).collect())
                .collect();
            if hypothesis == Hypothesis::SamplesVsPopulation {
                groups.push(d.rows().map(|r| r[j]).collect());
            }
            test_feature(name, &groups, small, cfg.alpha)
        })
        .collect();
    Ok(AnovaReport {
        hypothesis,
        alpha: cfg.alpha,
        features,
    })
}

/// ANOVA per column across the partition's clusters.
pub fn evaluate_partition(
    d: &Dataset,
    p: &Partition,
    cfg: &AnovaConfig,
) -> Result<AnovaReport, StatsError> {
    evaluate(d, p, cfg, Hypothesis::BetweenSamples)
}

/// ANOVA per column with every cluster plus the whole population as groups.
/// The population group overlaps the clusters by construction.
pub fn evaluate_vs_population(
    d: &Dataset,
    p: &Partition,
    cfg: &AnovaConfig,
) -> Result<AnovaReport, StatsError> {
    evaluate(d, p, cfg, Hypothesis::SamplesVsPopulation)
}
