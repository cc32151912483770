//! Command-line workflow: ingest, standardize, partition, evaluate, and the
//! end-to-end benchmark reproduction.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 acceptance failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::baseline::{random_partition, RngSeed};
use crate::dataset::{load_csv, Dataset, IngestOptions, LoadReport, NaPolicy};
use crate::partition::{Method, Partition, PartitionError};
use crate::preprocess::{standardization_residuals, standardize, StandardizationParams};
use crate::stats::report::csv_field;
use crate::stats::{
    evaluate_partition, evaluate_vs_population, format_sig, AnovaConfig, AnovaReport,
};
use crate::wobbly::{wobbly_partition_with, ConvergenceTrace, InputCheck, WobblyOptions};

pub const FETCH_SCRIPT: &str = "scripts/fetch_datasets.sh";

/// Pass/fail thresholds checked by `reproduce`.
pub mod thresholds {
    /// Every wobbly per-attribute p-value must reach this.
    pub const WOBBLY_MIN_P: f64 = 0.90;
    /// Fraction of seeds whose smallest random p must undercut the smallest wobbly p.
    pub const CONTRAST_SEED_FRACTION: f64 = 0.95;
    /// Largest final centroid distance to the population mean (standardized units).
    pub const FINAL_CENTROID_DISTANCE: f64 = 0.1;
    /// Largest tolerated |mean| and |std - 1| after standardization.
    pub const STANDARDIZATION_TOLERANCE: f64 = 1e-9;
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("acceptance checks failed: {0}")]
    Acceptance(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 1,
            HarnessError::Data(_) | HarnessError::Io { .. } => 2,
            HarnessError::Acceptance(_) => 3,
        }
    }
}

fn data_err(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Data(e.to_string())
}

fn partition_err(e: PartitionError) -> HarnessError {
    match e {
        PartitionError::KOutOfRange { .. } => HarnessError::Usage(e.to_string()),
        e => data_err(e),
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wobbly",
    version,
    about = "Representative k-way splits of tabular data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a dataset into k samples and write partition.json (+ trace.csv).
    Partition(PartitionArgs),
    /// Run per-feature one-way ANOVA on an existing partition.
    Evaluate(EvaluateArgs),
    /// Wobbly vs. seeded random sampling on a benchmark dataset, with pass/fail checks.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Wobbly,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NaPolicyArg {
    Error,
    DropRow,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Field delimiter (single byte).
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// The first line is data, not a header.
    #[arg(long)]
    pub no_header: bool,
    /// Fail on text columns instead of dropping them.
    #[arg(long)]
    pub keep_non_numeric: bool,
    #[arg(long, value_enum, default_value = "error")]
    pub na_policy: NaPolicyArg,
    /// Comma-separated column names for files without a header.
    #[arg(long, value_delimiter = ',')]
    pub column_names: Option<Vec<String>>,
    /// Use the values as they are instead of z-scoring them first.
    #[arg(long)]
    pub no_standardize: bool,
}

impl IngestArgs {
    pub fn to_options(&self) -> Result<IngestOptions, HarnessError> {
        if !self.delimiter.is_ascii() {
            return Err(HarnessError::Usage(format!(
                "delimiter {:?} must be a single ASCII character",
                self.delimiter
            )));
        }
        Ok(IngestOptions {
            has_header: !self.no_header,
            drop_non_numeric: !self.keep_non_numeric,
            na_policy: match self.na_policy {
                NaPolicyArg::Error => NaPolicy::Error,
                NaPolicyArg::DropRow => NaPolicy::DropRow,
            },
            delimiter: self.delimiter as u8,
            column_names: self.column_names.clone(),
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct PartitionArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub k: u64,
    #[arg(long, value_enum, default_value = "wobbly")]
    pub method: MethodArg,
    /// Seed for `--method random`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the per-append centroid trace.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub partition: PathBuf,
    /// Also test each sample against the whole population.
    #[arg(long)]
    pub vs_population: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Bundled benchmark profile (abalone or wine) looked up in --data-dir.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub dataset: Option<String>,
    /// Any CSV file instead of a named benchmark.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "data")]
    pub data_dir: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
    pub k: u64,
    /// Seeds for the random baseline: `1..100` (inclusive), `1,5,9`, or `42`.
    #[arg(long, default_value = "1..100")]
    pub seeds: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Defaults to `reproduce-<dataset>`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub ingest: IngestArgs,
}

/// A benchmark file layout known to `reproduce`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetProfile {
    pub name: &'static str,
    pub file_name: &'static str,
    pub url: &'static str,
    pub columns: &'static [&'static str],
}

pub const PROFILES: &[DatasetProfile] = &[
    DatasetProfile {
        name: "abalone",
        file_name: "abalone.data",
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/abalone/abalone.data",
        columns: &[
            "sex",
            "length",
            "diameter",
            "height",
            "whole_weight",
            "shucked_weight",
            "viscera_weight",
            "shell_weight",
            "rings",
        ],
    },
    DatasetProfile {
        name: "wine",
        file_name: "wine.data",
        url: "https://archive.ics.uci.edu/ml/machine-learning-databases/wine/wine.data",
        columns: &[
            "class",
            "alcohol",
            "malic_acid",
            "ash",
            "alcalinity_of_ash",
            "magnesium",
            "total_phenols",
            "flavanoids",
            "nonflavanoid_phenols",
            "proanthocyanins",
            "color_intensity",
            "hue",
            "od280_od315",
            "proline",
        ],
    },
];

pub fn profile(name: &str) -> Option<&'static DatasetProfile> {
    PROFILES.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

impl DatasetProfile {
    pub fn path_in(&self, data_dir: &Path) -> PathBuf {
        data_dir.join(self.file_name)
    }

    pub fn ingest_options(&self) -> IngestOptions {
        IngestOptions {
            has_header: false,
            column_names: Some(self.columns.iter().map(|c| c.to_string()).collect()),
            ..IngestOptions::default()
        }
    }
}

/// Parses `a..b` (inclusive), a comma list, or a single seed.
pub fn parse_seeds(spec: &str) -> Result<Vec<u64>, HarnessError> {
    let bad = || HarnessError::Usage(format!("cannot parse seed list {spec:?}"));
    let spec = spec.trim();
    if let Some((lo, hi)) = spec.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    let seeds = spec
        .split(',')
        .map(|s| s.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// Everything needed to re-run a command and get byte-identical outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: PathBuf,
    pub input_sha256: String,
    pub ingest: IngestOptions,
    pub standardized: bool,
    pub k: usize,
    pub methods: Vec<Method>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PathBuf>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    fn new(
        command: &str,
        input: &Path,
        input_sha256: String,
        ingest: &IngestOptions,
        standardized: bool,
        k: usize,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            input: input.to_path_buf(),
            input_sha256,
            ingest: ingest.clone(),
            standardized,
            k,
            methods: Vec::new(),
            seeds: Vec::new(),
            alpha: None,
            partition: None,
            outputs: Vec::new(),
        }
    }
}

pub fn sha256_file(path: &Path) -> Result<String, HarnessError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Dataset as loaded, and the matrix the algorithms actually see.
pub struct Prepared {
    pub raw: Dataset,
    pub working: Dataset,
    pub params: Option<StandardizationParams>,
    pub load_report: LoadReport,
    pub sha256: String,
}

pub fn prepare(
    path: &Path,
    ingest: &IngestOptions,
    standardize_input: bool,
) -> Result<Prepared, HarnessError> {
    let sha256 = sha256_file(path)?;
    let (raw, load_report) = load_csv(path, ingest).map_err(data_err)?;
    let (working, params) = if standardize_input {
        let (z, p) = standardize(&raw).map_err(data_err)?;
        (z, Some(p))
    } else {
        (raw.clone(), None)
    };
    Ok(Prepared {
        raw,
        working,
        params,
        load_report,
        sha256,
    })
}

struct OutDir {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    fn create(dir: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, HarnessError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(io_err(&path))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
    ) -> Result<PathBuf, HarnessError> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(io_err(&self.dir.join(name)))?;
        self.write(name, &buf)
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, HarnessError> {
        let mut s = serde_json::to_string_pretty(value).map_err(data_err)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Writes the manifest last, listing every file written before it.
    fn finish(
        mut self,
        name: &str,
        mut manifest: RunManifest,
    ) -> Result<Vec<PathBuf>, HarnessError> {
        manifest.outputs = self.written.clone();
        self.write_json(name, &manifest)?;
        Ok(self.written)
    }
}

fn trace_csv(trace: &ConvergenceTrace) -> impl FnOnce(&mut Vec<u8>) -> io::Result<()> + '_ {
    move |buf| trace.write_csv(buf)
}

pub fn cmd_partition(args: &PartitionArgs) -> Result<Vec<PathBuf>, HarnessError> {
    let ingest = args.ingest.to_options()?;
    let prepared = prepare(&args.input, &ingest, !args.ingest.no_standardize)?;
    let d = &prepared.working;
    let k = args.k as usize;

    let mut out = OutDir::create(&args.out_dir)?;
    out.write_json("load_report.json", &prepared.load_report)?;
    if let Some(p) = &prepared.params {
        out.write_json("standardization.json", p)?;
    }

    let (partition, trace) = match args.method {
        MethodArg::Wobbly => {
            let opts = WobblyOptions::new(k)
                .with_trace(args.trace)
                .with_input_check(InputCheck::Strict);
            let res = wobbly_partition_with(d, &opts).map_err(partition_err)?;
            (res.partition, res.trace)
        }
        MethodArg::Random => {
            if args.trace {
                log::warn!("--trace only applies to the wobbly method; ignored");
            }
            let p = random_partition(d, k, RngSeed(args.seed)).map_err(partition_err)?;
            (p, None)
        }
    };
    let mut json = partition.to_json();
    json.push('\n');
    out.write("partition.json", json.as_bytes())?;
    if let Some(t) = &trace {
        out.write_with("trace.csv", trace_csv(t))?;
    }

    let mut manifest = RunManifest::new(
        "partition",
        &args.input,
        prepared.sha256.clone(),
        &ingest,
        prepared.params.is_some(),
        k,
    );
    manifest.methods = vec![partition.method];
    if partition.method == Method::Random {
        manifest.seeds = vec![args.seed];
    }
    out.finish("manifest.json", manifest)
}

fn summary_line(label: &str, report: &AnovaReport) -> String {
    format!(
        "{label}: {} features, {} reject, {} fail_to_reject, {} degenerate (alpha = {})",
        report.features.len(),
        report.rejections(),
        report.count(crate::stats::Verdict::FailToReject),
        report.degenerate(),
        report.alpha
    )
}

pub fn cmd_evaluate(
    args: &EvaluateArgs,
    stdout: &mut dyn Write,
) -> Result<Vec<PathBuf>, HarnessError> {
    let cfg = AnovaConfig::new(args.alpha).map_err(|e| HarnessError::Usage(e.to_string()))?;
    let ingest = args.ingest.to_options()?;
    let prepared = prepare(&args.input, &ingest, !args.ingest.no_standardize)?;
    let text = fs::read_to_string(&args.partition).map_err(io_err(&args.partition))?;
    let partition: Partition = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Data(format!("{}: {e}", args.partition.display())))?;
    partition
        .validate(prepared.working.n_rows())
        .map_err(|e| HarnessError::Data(format!("partition does not match dataset: {e}")))?;

    let mut out = OutDir::create(&args.out_dir)?;
    let between = evaluate_partition(&prepared.working, &partition, &cfg).map_err(data_err)?;
    out.write_with("report.csv", |b| between.write_csv(b))?;
    out.write_json("report.json", &between)?;
    let label = format!("method {} (samples vs. each other)", partition.method);
    let mut lines = vec![summary_line(&label, &between)];

    if args.vs_population {
        let vs_pop =
            evaluate_vs_population(&prepared.working, &partition, &cfg).map_err(data_err)?;
        out.write_with("population_report.csv", |b| vs_pop.write_csv(b))?;
        out.write_json("population_report.json", &vs_pop)?;
        let label = format!("method {} (samples vs. population)", partition.method);
        lines.push(summary_line(&label, &vs_pop));
    }
    for line in lines {
        writeln!(stdout, "{line}").map_err(io_err(Path::new("<stdout>")))?;
    }

    let mut manifest = RunManifest::new(
        "evaluate",
        &args.input,
        prepared.sha256,
        &ingest,
        prepared.params.is_some(),
        partition.k,
    );
    manifest.methods = vec![partition.method];
    manifest.seeds = partition.seed.into_iter().collect();
    manifest.alpha = Some(cfg.alpha);
    manifest.partition = Some(args.partition.clone());
    out.finish("evaluate_manifest.json", manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl AcceptanceCheck {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

/// Results of one `reproduce` run, kept in memory for callers and tests.
#[derive(Debug, Clone)]
pub struct Reproduction {
    pub attributes: Vec<String>,
    pub wobbly: AnovaReport,
    pub wobbly_vs_population: AnovaReport,
    pub trace: ConvergenceTrace,
    pub seeds: Vec<u64>,
    pub random: Vec<AnovaReport>,
    pub checks: Vec<AcceptanceCheck>,
    pub outputs: Vec<PathBuf>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

fn opt_sig(p: Option<f64>) -> String {
    p.map(|p| format_sig(p, 7)).unwrap_or_default()
}

fn acceptance_checks(
    residuals: (f64, f64),
    wobbly: &AnovaReport,
    vs_population: &AnovaReport,
    trace: &ConvergenceTrace,
    random: &[AnovaReport],
) -> Vec<AcceptanceCheck> {
    use thresholds::*;
    let mut checks = Vec::new();

    checks.push(AcceptanceCheck::new(
        "standardization",
        residuals.0 < STANDARDIZATION_TOLERANCE && residuals.1 < STANDARDIZATION_TOLERANCE,
        format!(
            "max |mean| = {:e}, max |std - 1| = {:e} (limit {STANDARDIZATION_TOLERANCE:e})",
            residuals.0, residuals.1
        ),
    ));

    let wobbly_min = wobbly.min_p();
    checks.push(AcceptanceCheck::new(
        "wobbly_between_samples",
        wobbly.degenerate() == 0
            && wobbly.rejections() == 0
            && wobbly_min.is_some_and(|p| p >= WOBBLY_MIN_P),
        format!(
            "min p = {}, rejections = {}, degenerate = {} (need min p >= {WOBBLY_MIN_P}, no rejections)",
            opt_sig(wobbly_min),
            wobbly.rejections(),
            wobbly.degenerate()
        ),
    ));

    checks.push(AcceptanceCheck::new(
        "wobbly_vs_population",
        vs_population.degenerate() == 0 && vs_population.rejections() == 0,
        format!(
            "min p = {}, rejections = {}",
            opt_sig(vs_population.min_p()),
            vs_population.rejections()
        ),
    ));

    if !random.is_empty() {
        let wobbly_min = wobbly_min.unwrap_or(f64::NEG_INFINITY);
        let undercut = random
            .iter()
            .filter(|r| r.min_p().is_some_and(|p| p < wobbly_min))
            .count();
        let rejecting = random.iter().filter(|r| r.rejections() > 0).count();
        let fraction = undercut as f64 / random.len() as f64;
        checks.push(AcceptanceCheck::new(
            "baseline_contrast",
            fraction >= CONTRAST_SEED_FRACTION && rejecting >= 1,
            format!(
                "random min p < wobbly min p in {undercut}/{} seeds (need fraction >= {CONTRAST_SEED_FRACTION}); {rejecting} seeds reject on some attribute (need >= 1)",
                random.len()
            ),
        ));
    }

    let mut converged = true;
    let mut parts = Vec::new();
    for (c, entries) in trace.clusters.iter().enumerate() {
        let (Some(first), Some(last)) = (entries.first(), entries.last()) else {
            converged = false;
            continue;
        };
        let ok = last.dist_to_population_mean <= FINAL_CENTROID_DISTANCE
            && last.dist_to_population_mean < first.dist_to_population_mean;
        converged &= ok;
        parts.push(format!(
            "cluster {}: {} -> {}",
            c + 1,
            format_sig(first.dist_to_population_mean, 7),
            format_sig(last.dist_to_population_mean, 7)
        ));
    }
    checks.push(AcceptanceCheck::new(
        "convergence",
        converged,
        format!(
            "centroid distance to population mean, first -> final: {} (final must be <= {FINAL_CENTROID_DISTANCE} and below first)",
            parts.join("; ")
        ),
    ));
    checks
}

fn write_comparison(
    w: &mut Vec<u8>,
    attributes: &[String],
    random_summary: &[Option<f64>],
    wobbly: &AnovaReport,
) -> io::Result<()> {
    writeln!(w, "Attribute,Random Sampling,Wobbly Center Algorithm")?;
    for (j, name) in attributes.iter().enumerate() {
        writeln!(
            w,
            "{},{},{}",
            csv_field(name),
            opt_sig(random_summary[j]),
            opt_sig(wobbly.features[j].p_value())
        )?;
    }
    Ok(())
}

pub fn cmd_reproduce(
    args: &ReproduceArgs,
    stdout: &mut dyn Write,
) -> Result<Reproduction, HarnessError> {
    let cfg = AnovaConfig::new(args.alpha).map_err(|e| HarnessError::Usage(e.to_string()))?;
    let seeds = parse_seeds(&args.seeds)?;
    let k = args.k as usize;

    let (label, input, ingest) = match (&args.dataset, &args.input) {
        (Some(name), _) => {
            let profile = profile(name).ok_or_else(|| {
                let known: Vec<&str> = PROFILES.iter().map(|p| p.name).collect();
                HarnessError::Usage(format!(
                    "unknown dataset {name:?}; known: {}",
                    known.join(", ")
                ))
            })?;
            let path = profile.path_in(&args.data_dir);
            if !path.is_file() {
                return Err(HarnessError::Data(format!(
                    "dataset file {} not found; run {FETCH_SCRIPT} to download it into {}",
                    path.display(),
                    args.data_dir.display()
                )));
            }
            (profile.name.to_string(), path, profile.ingest_options())
        }
        (None, Some(path)) => {
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "input".into());
            (label, path.clone(), args.ingest.to_options()?)
        }
        (None, None) => return Err(HarnessError::Usage("need --dataset or --input".into())),
    };

    let prepared = prepare(&input, &ingest, !args.ingest.no_standardize)?;
    let d = &prepared.working;
    let attributes = d.column_names().to_vec();

    let wobbly = wobbly_partition_with(
        d,
        &WobblyOptions::new(k)
            .with_trace(true)
            .with_input_check(InputCheck::Strict),
    )
    .map_err(partition_err)?;
    let trace = wobbly.trace.expect("trace requested");
    let wobbly_report = evaluate_partition(d, &wobbly.partition, &cfg).map_err(data_err)?;
    let vs_population = evaluate_vs_population(d, &wobbly.partition, &cfg).map_err(data_err)?;

    let random: Vec<AnovaReport> = seeds
        .iter()
        .map(|&s| {
            let p = random_partition(d, k, RngSeed(s)).map_err(partition_err)?;
            evaluate_partition(d, &p, &cfg).map_err(data_err)
        })
        .collect::<Result<_, _>>()?;

    let random_min: Vec<Option<f64>> = (0..attributes.len())
        .map(|j| {
            random
                .iter()
                .filter_map(|r| r.features[j].p_value())
                .min_by(f64::total_cmp)
        })
        .collect();
    let random_median: Vec<Option<f64>> = (0..attributes.len())
        .map(|j| {
            let mut ps: Vec<f64> = random
                .iter()
                .filter_map(|r| r.features[j].p_value())
                .collect();
            median(&mut ps)
        })
        .collect();

    let checks = acceptance_checks(
        standardization_residuals(d),
        &wobbly_report,
        &vs_population,
        &trace,
        &random,
    );

    let out_dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("reproduce-{label}")));
    let mut out = OutDir::create(&out_dir)?;
    out.write_json("load_report.json", &prepared.load_report)?;
    let mut json = wobbly.partition.to_json();
    json.push('\n');
    out.write("wobbly_partition.json", json.as_bytes())?;
    out.write_with("trace.csv", trace_csv(&trace))?;
    out.write_with("wobbly_report.csv", |b| wobbly_report.write_csv(b))?;
    out.write_with("wobbly_population_report.csv", |b| {
        vs_population.write_csv(b)
    })?;
    out.write_with("comparison.csv", |w| {
        write_comparison(w, &attributes, &random_median, &wobbly_report)
    })?;
    out.write_with("random_sweep.csv", |w| {
        write!(w, "seed")?;
        for a in &attributes {
            write!(w, ",{}", csv_field(a))?;
        }
        writeln!(w, ",min_p,rejections")?;
        for (seed, r) in seeds.iter().zip(&random) {
            write!(w, "{seed}")?;
            for p in r.p_values() {
                write!(w, ",{}", opt_sig(p))?;
            }
            writeln!(w, ",{},{}", opt_sig(r.min_p()), r.rejections())?;
        }
        Ok(())
    })?;
    out.write_with("random_summary.csv", |w| {
        writeln!(w, "attribute,min_p,median_p")?;
        for (j, a) in attributes.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                csv_field(a),
                opt_sig(random_min[j]),
                opt_sig(random_median[j])
            )?;
        }
        Ok(())
    })?;
    out.write_json("acceptance.json", &checks)?;

    let mut manifest = RunManifest::new(
        "reproduce",
        &input,
        prepared.sha256.clone(),
        &ingest,
        prepared.params.is_some(),
        k,
    );
    manifest.methods = vec![Method::Wobbly, Method::Random];
    manifest.seeds = seeds.clone();
    manifest.alpha = Some(cfg.alpha);
    let outputs = out.finish("manifest.json", manifest)?;

    let emit = |stdout: &mut dyn Write| -> io::Result<()> {
        writeln!(
            stdout,
            "{label}: n = {}, {} attributes, k = {k}, {} random seeds (Random Sampling column = median p over seeds)",
            d.n_rows(),
            attributes.len(),
            seeds.len()
        )?;
        let width = attributes.iter().map(String::len).max().unwrap_or(0).max(9);
        writeln!(
            stdout,
            "{:<width$}  {:>15}  {:>23}",
            "Attribute", "Random Sampling", "Wobbly Center Algorithm"
        )?;
        for (j, a) in attributes.iter().enumerate() {
            writeln!(
                stdout,
                "{:<width$}  {:>15}  {:>23}",
                a,
                opt_sig(random_median[j]),
                opt_sig(wobbly_report.features[j].p_value())
            )?;
        }
        for c in &checks {
            writeln!(
                stdout,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    };
    emit(stdout).map_err(io_err(Path::new("<stdout>")))?;

    Ok(Reproduction {
        attributes,
        wobbly: wobbly_report,
        wobbly_vs_population: vs_population,
        trace,
        seeds,
        random,
        checks,
        outputs,
    })
}

/// Parses arguments and runs a command; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Partition(a) => cmd_partition(a).map(|_| ()),
        Command::Evaluate(a) => cmd_evaluate(a, stdout).map(|_| ()),
        Command::Reproduce(a) => cmd_reproduce(a, stdout).and_then(|r| {
            if r.passed() {
                Ok(())
            } else {
                let failed: Vec<&str> = r
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(HarnessError::Acceptance(failed.join(", ")))
            }
        }),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
