//! Command-line interface: dataset generation, counting, and benchmarking.
//!
//! Exit code contract (stable for CI): 0 success, 1 I/O or data error,
//! 2 usage error, 3 correctness (digest) failure. Human-readable summaries
//! go to stdout, diagnostics to stderr.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{
    self, assemble_report, run_cumulative_suite_impl, run_trial_suite_impl, BenchError,
    BenchmarkReport, DatasetSummary, EnvironmentInfo,
};
use crate::counter::{
    self, count_attribute, default_chunk_size, detected_parallelism, CounterError,
    ExecutionStrategy,
};
use crate::dataset::{self, Dataset, DatasetError};
use crate::synth::{self, SynthError, SyntheticSpec};

/// Reserved attribute-list keyword meaning "every attribute in the schema".
pub const ALL_ATTRIBUTES: &str = "all";

/// Parsed command line: exactly one subcommand plus its flags.
#[derive(Debug, Parser)]
#[command(
    name = "freqbench",
    version,
    about = "Categorical frequency counting over delimited data, with \
             sequential and multithreaded strategies and a timing benchmark \
             harness"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic vital-events dataset
    Gen(GenArgs),
    /// Count value frequencies for selected attributes of a delimited file
    Count(CountArgs),
    /// Time baseline vs threaded counting and write a benchmark report
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of data rows to generate
    #[arg(long, default_value_t = 500_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub rows: u64,

    /// Generator seed; same seed and spec give byte-identical output
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// JSON spec file describing rows, seed and per-attribute distributions
    /// (replaces --rows/--seed and the built-in vital-events schema)
    #[arg(long, conflicts_with_all = ["rows", "seed"])]
    pub spec: Option<PathBuf>,

    /// Output dataset path
    #[arg(long)]
    pub out: PathBuf,

    /// Field delimiter for the output file
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// Input delimited file
    #[arg(long)]
    pub input: PathBuf,

    /// Comma-separated attribute names, or "all"
    #[arg(long)]
    pub attributes: String,

    /// Execution strategy for the counting run
    #[arg(long, value_enum, default_value_t = StrategyKind::Sequential)]
    pub strategy: StrategyKind,

    /// Worker threads (per-attribute / row-chunks / hybrid attribute axis);
    /// defaults to the detected hardware parallelism
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    /// Rows per chunk for the row-chunks strategy; defaults to
    /// row_count / (4 * workers), floored at 1024
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub chunk: Option<u64>,

    /// Worker threads on the hybrid strategy's chunk axis
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub chunk_workers: Option<u64>,

    /// Field delimiter of the input file
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Treat the first line as data and synthesize attr_1..attr_k names
    #[arg(long)]
    pub no_header: bool,

    /// Write the frequency tables as a JSON array to this path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Input delimited file to benchmark
    #[arg(long, conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,

    /// Benchmark a generated synthetic dataset instead of a file
    #[arg(long)]
    pub synthetic: bool,

    /// Synthetic dataset rows (with --synthetic)
    #[arg(long, default_value_t = 500_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub rows: u64,

    /// Synthetic dataset seed (with --synthetic)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,

    /// Comma-separated attribute names, or "all"
    #[arg(long, default_value = ALL_ATTRIBUTES)]
    pub attributes: String,

    /// Optimized-arm strategy (the baseline arm is always sequential)
    #[arg(long, value_enum, default_value_t = StrategyKind::PerAttribute)]
    pub strategy: StrategyKind,

    /// Worker threads for the optimized arm
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    /// Rows per chunk for the row-chunks strategy
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub chunk: Option<u64>,

    /// Worker threads on the hybrid strategy's chunk axis
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub chunk_workers: Option<u64>,

    /// Which experiment to run
    #[arg(long, value_enum, default_value_t = SuiteKind::Both)]
    pub suite: SuiteKind,

    /// Timed runs per arm at each cumulative prefix size
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,

    /// Timed runs per arm per attribute in the trial suite
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Significance level for the means test
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Output directory for report.json and the plot CSVs
    #[arg(long, default_value = "freqbench-out")]
    pub out: PathBuf,

    /// Field delimiter of the input file
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Treat the first line as data and synthesize attr_1..attr_k names
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyKind {
    Sequential,
    PerAttribute,
    RowChunks,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteKind {
    Cumulative,
    Trials,
    Both,
}

/// Errors carrying the CLI exit code contract.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: bad flags or configuration.
    Usage(String),
    /// Exit 1: I/O or data problems.
    Data(String),
    /// Exit 3: strategy-equivalence (digest) failure.
    Digest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
            CliError::Digest(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Digest(m) => m,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CounterError> for CliError {
    fn from(e: CounterError) -> Self {
        match e {
            CounterError::InvalidStrategy(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::Io { .. } => CliError::Data(e.to_string()),
            SynthError::Dataset(inner) => CliError::Data(inner.to_string()),
            // Bad spec content is configuration, not data.
            SynthError::InvalidSpec(_) | SynthError::Parse(_) => CliError::Usage(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::DigestMismatch { .. } => CliError::Digest(e.to_string()),
            BenchError::StrategyIsSequential | BenchError::InsufficientTrials { .. } => {
                CliError::Usage(e.to_string())
            }
            BenchError::Counter(inner) => inner.into(),
            BenchError::Stats(inner) => CliError::Usage(inner.to_string()),
            BenchError::InconsistentInputs(_) => CliError::Data(e.to_string()),
        }
    }
}

/// Dispatches the parsed configuration.
pub fn run(config: RunConfig) -> Result<(), CliError> {
    validate_threads_env()?;
    match config.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Count(args) => cmd_count(&args),
        Command::Bench(args) => cmd_bench(&args),
    }
}

fn validate_threads_env() -> Result<(), CliError> {
    match std::env::var("FREQBENCH_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(CliError::Usage(format!(
                "FREQBENCH_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn delimiter_byte(c: char, flag: &str) -> Result<u8, CliError> {
    u8::try_from(c).map_err(|_| {
        CliError::Usage(format!(
            "{flag} must be a single ASCII character, got {c:?}"
        ))
    })
}

/// Splits a comma-separated attribute list (or the "all" keyword), dropping
/// later duplicates while preserving first-occurrence order.
fn resolve_attributes(raw: &str, ds: &Dataset) -> Result<Vec<String>, CliError> {
    if raw.trim() == ALL_ATTRIBUTES {
        return Ok(ds.schema().names().to_vec());
    }
    let mut names: Vec<String> = Vec::new();
    for part in raw.split(',') {
        let name = part.trim();
        if name.is_empty() {
            return Err(CliError::Usage(format!(
                "--attributes contains an empty name in {raw:?}"
            )));
        }
        if !names.iter().any(|n| n == name) {
            names.push(name.to_string());
        }
    }
    if names.is_empty() {
        return Err(CliError::Usage(
            "--attributes must name at least one attribute".into(),
        ));
    }
    Ok(names)
}

fn build_strategy(
    kind: StrategyKind,
    workers: Option<u64>,
    chunk: Option<u64>,
    chunk_workers: Option<u64>,
    requested_attributes: usize,
    row_count: usize,
) -> ExecutionStrategy {
    match kind {
        StrategyKind::Sequential => ExecutionStrategy::Sequential,
        StrategyKind::PerAttribute => match workers {
            Some(w) => ExecutionStrategy::PerAttribute {
                max_workers: w as usize,
            },
            None => ExecutionStrategy::per_attribute_default(requested_attributes),
        },
        StrategyKind::RowChunks => {
            let workers = workers.map_or_else(detected_parallelism, |w| w as usize);
            let chunk =
                chunk.map_or_else(|| default_chunk_size(row_count, workers), |c| c as usize);
            ExecutionStrategy::RowChunks { workers, chunk }
        }
        StrategyKind::Hybrid => {
            let attribute_workers = workers.map_or_else(
                || requested_attributes.min(detected_parallelism()).max(1),
                |w| w as usize,
            );
            let chunk_workers = chunk_workers.map_or(2, |c| c as usize);
            ExecutionStrategy::Hybrid {
                attribute_workers,
                chunk_workers,
            }
        }
    }
}

fn fault_digest_requested() -> bool {
    std::env::var("FREQBENCH_FAULT_DIGEST").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let delimiter = delimiter_byte(args.delimiter, "--delimiter")?;
    let spec: SyntheticSpec = match &args.spec {
        Some(path) => synth::load_spec(path)?,
        None => synth::default_vitals_spec(args.rows, args.seed),
    };
    let ds = synth::generate(&spec)?;
    ds.write_delimited(&args.out, delimiter)?;

    println!(
        "wrote {} rows x {} attributes to {}",
        ds.row_count(),
        ds.schema().len(),
        args.out.display()
    );
    for name in ds.schema().names() {
        let table = count_attribute(&ds, name)?;
        println!("  {name}: {} categories", table.counts().len());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// count
// ---------------------------------------------------------------------------

pub fn cmd_count(args: &CountArgs) -> Result<(), CliError> {
    let delimiter = delimiter_byte(args.delimiter, "--delimiter")?;
    let ds = dataset::load_delimited(&args.input, delimiter, !args.no_header)?;
    let names = resolve_attributes(&args.attributes, &ds)?;
    let strategy = build_strategy(
        args.strategy,
        args.workers,
        args.chunk,
        args.chunk_workers,
        names.len(),
        ds.row_count(),
    );

    let (tables, wall_seconds) = bench::measure(|| counter::count_many(&ds, &names, &strategy));
    let tables = tables?;

    for table in &tables {
        println!("{} ({} rows):", table.attribute(), table.total());
        for (value, count) in table.counts() {
            println!("  {value}: {count}");
        }
    }
    println!(
        "counted {} attribute(s) over {} rows in {:.6} s (strategy: {})",
        tables.len(),
        ds.row_count(),
        wall_seconds,
        strategy.describe()
    );

    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&tables).expect("table serialization cannot fail");
        write_file(out, &json)?;
        eprintln!("tables written to {}", out.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let delimiter = delimiter_byte(args.delimiter, "--delimiter")?;
    let ds = if args.synthetic {
        eprintln!(
            "generating {} synthetic rows (seed {})",
            args.rows, args.seed
        );
        synth::generate(&synth::default_vitals_spec(args.rows, args.seed))?
    } else {
        match &args.input {
            Some(path) => dataset::load_delimited(path, delimiter, !args.no_header)?,
            None => {
                return Err(CliError::Usage(
                    "either --input or --synthetic is required".into(),
                ))
            }
        }
    };
    let names = resolve_attributes(&args.attributes, &ds)?;
    let strategy = build_strategy(
        args.strategy,
        args.workers,
        args.chunk,
        args.chunk_workers,
        names.len(),
        ds.row_count(),
    );
    let fault = fault_digest_requested();

    let cumulative = if matches!(args.suite, SuiteKind::Cumulative | SuiteKind::Both) {
        eprintln!(
            "running cumulative suite: k=1..{} x {} repeats per arm",
            names.len(),
            args.repeats
        );
        Some(run_cumulative_suite_impl(
            &ds,
            &names,
            &strategy,
            args.repeats as usize,
            fault,
        )?)
    } else {
        None
    };
    let trial = if matches!(args.suite, SuiteKind::Trials | SuiteKind::Both) {
        eprintln!(
            "running trial suite: {} attribute(s) x {} trials per arm",
            names.len(),
            args.trials
        );
        Some(run_trial_suite_impl(
            &ds,
            &names,
            &strategy,
            args.trials as usize,
            fault,
        )?)
    } else {
        None
    };

    let report = assemble_report(
        DatasetSummary::of(&ds),
        cumulative,
        trial,
        args.alpha,
        EnvironmentInfo::capture(),
    )?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out.display())))?;
    let report_path = args.out.join("report.json");
    write_file(&report_path, &report.to_json_pretty())?;
    if let Some(suite) = &report.cumulative_suite {
        let path = args.out.join("cumulative.csv");
        bench::write_cumulative_csv(suite, &path)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(suite) = &report.trial_suite {
        let path = args.out.join("trials.csv");
        bench::write_trials_csv(suite, &path)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    }

    print_bench_summary(&report, &args.out);
    Ok(())
}

fn print_bench_summary(report: &BenchmarkReport, out_dir: &Path) {
    println!(
        "dataset: {} rows x {} attributes",
        report.dataset.row_count,
        report.dataset.attributes.len()
    );
    println!("optimized arm: {}", optimized_strategy_label(report));

    let mut all_baseline = Vec::new();
    let mut all_optimized = Vec::new();
    if let Some(suite) = &report.cumulative_suite {
        println!("cumulative suite ({} repeats per arm):", suite.repeats);
        for level in &suite.levels {
            println!(
                "  k={}: baseline {:.6} s, optimized {:.6} s, improvement {:.2}%",
                level.k, level.baseline_mean_s, level.optimized_mean_s, level.improvement_pct
            );
            all_baseline.extend(level.baseline.iter().map(|t| t.wall_seconds));
            all_optimized.extend(level.optimized.iter().map(|t| t.wall_seconds));
        }
    }
    if let Some(suite) = &report.trial_suite {
        println!("trial suite ({} trials per arm):", suite.trials);
        for attr in &suite.attributes {
            println!(
                "  {}: baseline {:.6} s, optimized {:.6} s, improvement of means {:.2}%",
                attr.attribute,
                attr.baseline_mean_s,
                attr.optimized_mean_s,
                attr.improvement_pct_of_means
            );
            all_baseline.extend(attr.baseline.iter().map(|t| t.wall_seconds));
            all_optimized.extend(attr.optimized.iter().map(|t| t.wall_seconds));
        }
        println!(
            "  mean of per-trial improvements: {:.2}%  |  improvement of mean runtimes: {:.2}%",
            suite.mean_improvement_pct, suite.improvement_pct_of_means
        );
    }

    let overall = overall_improvement(&all_baseline, &all_optimized);
    match (&report.means_test, overall) {
        (Some(test), Some(pct)) => println!(
            "improvement: {:.2}% (means test: reject at alpha={}: {})",
            pct, test.alpha, test.reject_null
        ),
        (None, Some(pct)) => {
            println!("improvement: {pct:.2}% (means test: insufficient samples)")
        }
        _ => {}
    }
    println!(
        "report written to {}",
        out_dir.join("report.json").display()
    );
}

fn optimized_strategy_label(report: &BenchmarkReport) -> String {
    report
        .cumulative_suite
        .iter()
        .flat_map(|s| &s.levels)
        .flat_map(|l| &l.optimized)
        .chain(
            report
                .trial_suite
                .iter()
                .flat_map(|s| &s.attributes)
                .flat_map(|a| &a.optimized),
        )
        .next()
        .map_or_else(|| "unknown".to_string(), |t| t.strategy.describe())
}

fn overall_improvement(baseline: &[f64], optimized: &[f64]) -> Option<f64> {
    if baseline.is_empty() || optimized.is_empty() {
        return None;
    }
    let mb = baseline.iter().sum::<f64>() / baseline.len() as f64;
    let mo = optimized.iter().sum::<f64>() / optimized.len() as f64;
    crate::stats::improvement_pct(mb, mo).ok()
}
