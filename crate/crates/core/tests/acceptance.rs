//! Exit criteria. Each test prints one `[criterion N]` line with PASS/FAIL
//! and the observed values, then asserts.
//!
//! Run with `cargo test -p wobbly --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

mod common;

use std::time::{Duration, Instant};

use common::{desk_oracle, load_profile, DataGen};
use wobbly::baseline::{random_partition, RngSeed};
use wobbly::dataset::Dataset;
use wobbly::preprocess::{standardization_residuals, standardize};
use wobbly::stats::{
    evaluate_partition, f_sf, one_way_anova, reg_inc_beta, t_test_two_sample, AnovaConfig,
    AnovaReport,
};
use wobbly::wobbly::{wobbly_partition_with, InputCheck, WobblyOptions};
use wobbly::Partition;

fn verdict(id: u32, name: &str, passed: bool, detail: String) {
    println!(
        "[criterion {id}] {name}: {} ({detail})",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {id} ({name}) failed: {detail}");
}

fn wobbly(d: &Dataset, k: usize) -> wobbly::wobbly::WobblyOutput {
    wobbly_partition_with(
        d,
        &WobblyOptions::new(k)
            .with_trace(true)
            .with_input_check(InputCheck::Off),
    )
    .unwrap()
}

fn standardized(name: &str) -> Dataset {
    standardize(&load_profile(name)).unwrap().0
}

fn fmt_ps(report: &AnovaReport) -> String {
    report
        .p_values()
        .iter()
        .map(|p| p.map_or("-".to_string(), |p| format!("{p:.7}")))
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn criterion_1_desk_oracle_equivalence() {
    let start = Instant::now();
    let five = Dataset::from_unnamed_rows(vec![
        vec![-2.0],
        vec![-1.0],
        vec![0.0],
        vec![1.0],
        vec![2.0],
    ])
    .unwrap();
    let hand = wobbly(&five, 2).partition.clusters;
    let mut mismatches = usize::from(hand != vec![vec![2, 0, 3], vec![1, 4]]);

    let mut gen = DataGen::new(2024);
    for _ in 0..200 {
        let n = 2 + gen.below(11);
        let dim = 1 + gen.below(3);
        let points = gen.points(n, dim);
        let d = Dataset::from_unnamed_rows(points.clone()).unwrap();
        if wobbly(&d, 2).partition.clusters != desk_oracle(&points, 2) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "desk oracle equivalence",
        mismatches == 0 && elapsed < Duration::from_secs(5),
        format!(
            "hand example {hand:?}; {mismatches} mismatches over 1 + 200 datasets; {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_2_abalone_reproduction() {
    let start = Instant::now();
    let d = standardized("abalone");
    let out = wobbly(&d, 2);
    let report = evaluate_partition(&d, &out.partition, &AnovaConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let min_p = report.min_p().unwrap_or(0.0);
    verdict(
        2,
        "Abalone wobbly p-values",
        d.n_rows() == 4177
            && d.n_cols() == 8
            && report.degenerate() == 0
            && min_p >= 0.90
            && report.rejections() == 0
            && elapsed < Duration::from_secs(60),
        format!(
            "n = {}, {} attributes, p = [{}], min {min_p:.7}, {} rejections, {elapsed:.2?}",
            d.n_rows(),
            d.n_cols(),
            fmt_ps(&report),
            report.rejections()
        ),
    );
}

#[test]
fn criterion_3_wine_reproduction() {
    let start = Instant::now();
    let d = standardized("wine");
    let out = wobbly(&d, 2);
    let report = evaluate_partition(&d, &out.partition, &AnovaConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let min_p = report.min_p().unwrap_or(0.0);
    verdict(
        3,
        "Wine wobbly p-values",
        report.degenerate() == 0
            && min_p >= 0.90
            && report.rejections() == 0
            && elapsed < Duration::from_secs(10),
        format!(
            "n = {}, {} attributes, p = [{}], min {min_p:.7}, {} rejections, {elapsed:.2?}",
            d.n_rows(),
            d.n_cols(),
            fmt_ps(&report),
            report.rejections()
        ),
    );
}

#[test]
fn criterion_4_baseline_contrast() {
    let d = standardized("abalone");
    let cfg = AnovaConfig::default();
    let wobbly_min = evaluate_partition(&d, &wobbly(&d, 2).partition, &cfg)
        .unwrap()
        .min_p()
        .unwrap();
    let mut undercut = 0;
    let mut rejecting = 0;
    for seed in 1..=100 {
        let p = random_partition(&d, 2, RngSeed(seed)).unwrap();
        let r = evaluate_partition(&d, &p, &cfg).unwrap();
        if r.min_p().unwrap() < wobbly_min {
            undercut += 1;
        }
        if r.rejections() > 0 {
            rejecting += 1;
        }
    }
    verdict(
        4,
        "baseline contrast on Abalone",
        undercut >= 95 && rejecting >= 1,
        format!(
            "random min p < wobbly min p ({wobbly_min:.7}) in {undercut}/100 seeds; {rejecting} seeds reject"
        ),
    );
}

#[test]
fn criterion_5_anova_t_equivalence() {
    let mut gen = DataGen::new(55);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let n1 = 2 + gen.below(30);
        let n2 = 2 + gen.below(30);
        let shift = gen.uniform(-1.0, 1.0);
        let scale = gen.uniform(0.1, 10.0);
        let x: Vec<f64> = (0..n1).map(|_| scale * gen.uniform(-1.0, 1.0)).collect();
        let y: Vec<f64> = (0..n2)
            .map(|_| scale * (shift + gen.uniform(-1.0, 1.0)))
            .collect();
        let pa = one_way_anova(&[&x[..], &y[..]]).unwrap().p_value;
        let pt = t_test_two_sample(&x, &y).unwrap().p_two_sided;
        worst = worst.max((pa - pt).abs());
    }
    verdict(
        5,
        "ANOVA / pooled t-test equivalence",
        worst <= 1e-9,
        format!("max |p_anova - p_t| = {worst:e} over 1000 inputs"),
    );
}

#[test]
fn criterion_6_special_function_accuracy() {
    let mut gen = DataGen::new(66);
    let mut worst = 0.0_f64;
    for _ in 0..10_000 {
        let a = 100.0 * (1.0 - gen.unit());
        let b = 100.0 * (1.0 - gen.unit());
        let x = gen.unit();
        let s = reg_inc_beta(a, b, x).unwrap() + reg_inc_beta(b, a, 1.0 - x).unwrap();
        worst = worst.max((s - 1.0).abs());
    }
    let i = reg_inc_beta(2.0, 3.0, 0.5).unwrap();
    // two-sided t tail at t = sqrt(8), 2 df: 1 - t / sqrt(2 + t^2)
    let t_oracle = 1.0 - 8.0_f64.sqrt() / 10.0_f64.sqrt();
    let f = f_sf(8.0, 1.0, 2.0).unwrap();
    verdict(
        6,
        "special-function accuracy",
        worst <= 1e-12 && (i - 0.6875).abs() <= 1e-12 && (f - t_oracle).abs() <= 1e-4,
        format!(
            "symmetry max error {worst:e}; I_0.5(2,3) = {i}; f_sf(8,1,2) = {f:.7} vs {t_oracle:.7}"
        ),
    );
}

#[test]
fn criterion_7_standardization() {
    let mut details = Vec::new();
    let mut ok = true;
    for name in ["abalone", "wine"] {
        let (mean_err, std_err) = standardization_residuals(&standardized(name));
        ok &= mean_err < 1e-9 && std_err < 1e-9;
        details.push(format!(
            "{name}: |mean| {mean_err:e}, |std - 1| {std_err:e}"
        ));
    }
    verdict(7, "standardization", ok, details.join("; "));
}

fn structurally_sound(p: &Partition, n: usize) -> bool {
    p.validate(n).is_ok() && p.is_balanced()
}

#[test]
fn criterion_8_structural_invariants() {
    let mut gen = DataGen::new(88);
    let mut failures = 0;
    for run in 0..500 {
        let n = 5 + gen.below(200);
        let dim = 1 + gen.below(4);
        let k = [2, 3, 5][gen.below(3)];
        let d = Dataset::from_unnamed_rows(gen.points(n, dim)).unwrap();
        let seed = RngSeed(run as u64);
        let (a, b) = if run % 2 == 0 {
            (wobbly(&d, k).partition, wobbly(&d, k).partition)
        } else {
            (
                random_partition(&d, k, seed).unwrap(),
                random_partition(&d, k, seed).unwrap(),
            )
        };
        if !(structurally_sound(&a, n) && a == b) {
            failures += 1;
        }
    }
    verdict(
        8,
        "structural invariants",
        failures == 0,
        format!("{failures} failures over 500 runs (250 wobbly, 250 random)"),
    );
}

#[test]
fn criterion_9_convergence_trace() {
    let d = standardized("abalone");
    let trace = wobbly(&d, 2).trace.unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for (c, entries) in trace.clusters.iter().enumerate() {
        let first = entries.first().unwrap().dist_to_population_mean;
        let last = entries.last().unwrap().dist_to_population_mean;
        ok &= last <= 0.1 && last < first;
        details.push(format!("cluster {}: {first:.6} -> {last:.6}", c + 1));
    }
    verdict(9, "convergence trace", ok, details.join("; "));
}
