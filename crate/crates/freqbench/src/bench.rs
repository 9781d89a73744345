//! Benchmark harness: times counting runs under baseline (sequential) and
//! optimized (threaded) arms and assembles a reproducible report.
//!
//! Two experiment shapes are supported. The cumulative suite counts attribute
//! prefixes of growing size (1..K attributes), the trial suite repeats
//! single-attribute runs. In both, the timer wraps exactly the counting call:
//! dataset loading happens before any clock starts. Trials execute strictly
//! one at a time; the baseline arm always runs before the optimized arm and
//! each timed arm is preceded by one untimed warm-up run. Every timed run
//! records a SHA-256 digest of its canonical tables, and any digest
//! divergence between arms aborts the benchmark: correctness is never
//! traded for speed.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::counter::{
    count_many, tables_canonical_json, CounterError, ExecutionStrategy, FrequencyTable,
};
use crate::dataset::Dataset;
use crate::stats::{
    improvement_pct, mean_improvement, welch_t_test, MeansTestResult, SampleStats, StatsError,
};

/// Version tag written into every report file.
pub const REPORT_SCHEMA_VERSION: &str = "freqbench-report/1";

/// Tolerance for the report recomputation invariant.
pub const RECOMPUTE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Counter(#[from] CounterError),

    #[error(transparent)]
    Stats(#[from] StatsError),

    #[error("optimized arm strategy must differ from the sequential baseline")]
    StrategyIsSequential,

    #[error("benchmark needs at least {min} {what}, got {got}")]
    InsufficientTrials {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error(
        "digest mismatch on attributes [{attributes}], trial {trial}: \
         baseline {baseline} vs optimized {optimized}"
    )]
    DigestMismatch {
        attributes: String,
        trial: usize,
        baseline: String,
        optimized: String,
    },

    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(String),
}

/// Which side of the comparison a timing belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Baseline,
    Optimized,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::Baseline => "baseline",
            Arm::Optimized => "optimized",
        })
    }
}

/// One measured counting run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialTiming {
    pub arm: Arm,
    pub strategy: ExecutionStrategy,
    pub attributes: Vec<String>,
    pub wall_seconds: f64,
    /// SHA-256 over the canonical JSON serialization of the result tables.
    pub counts_digest: String,
    /// 1-based position within its arm.
    pub trial_index: usize,
}

/// Runs `work` and returns its result with the monotonic-clock wall time in
/// seconds. Only the call itself is timed.
pub fn measure<T>(work: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let result = work();
    let elapsed = start.elapsed().as_secs_f64();
    (result, elapsed)
}

/// Content digest used to enforce strategy invariance across arms.
pub fn digest_tables(tables: &[FrequencyTable]) -> String {
    hex::encode(Sha256::digest(tables_canonical_json(tables).as_bytes()))
}

// ---------------------------------------------------------------------------
// Suite results
// ---------------------------------------------------------------------------

/// Timings and derived numbers for one prefix size of the cumulative suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeLevel {
    pub k: usize,
    pub attributes: Vec<String>,
    pub baseline_mean_s: f64,
    pub optimized_mean_s: f64,
    pub improvement_pct: f64,
    pub baseline: Vec<TrialTiming>,
    pub optimized: Vec<TrialTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativeSuiteResult {
    pub repeats: usize,
    pub levels: Vec<CumulativeLevel>,
}

/// Timings and derived numbers for one attribute of the trial suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeTrials {
    pub attribute: String,
    pub baseline_mean_s: f64,
    pub optimized_mean_s: f64,
    /// Mean of the per-trial improvement percentages.
    pub mean_improvement_pct: f64,
    /// Improvement percentage of the mean runtimes.
    pub improvement_pct_of_means: f64,
    pub baseline: Vec<TrialTiming>,
    pub optimized: Vec<TrialTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSuiteResult {
    pub trials: usize,
    pub attributes: Vec<AttributeTrials>,
    /// Mean of per-trial improvement percentages across all attributes.
    pub mean_improvement_pct: f64,
    /// Improvement of the pooled mean runtimes across all attributes.
    pub improvement_pct_of_means: f64,
}

impl CumulativeSuiteResult {
    /// Builds the suite summary from raw per-level timings, checking digest
    /// agreement between arms. `raw` holds `(attributes, baseline, optimized)`
    /// per prefix size, smallest first.
    pub fn from_raw(
        repeats: usize,
        raw: Vec<(Vec<String>, Vec<TrialTiming>, Vec<TrialTiming>)>,
    ) -> Result<Self, BenchError> {
        if raw.is_empty() {
            return Err(BenchError::InconsistentInputs(
                "cumulative suite has no levels".into(),
            ));
        }
        let mut levels = Vec::with_capacity(raw.len());
        for (k, (attributes, baseline, optimized)) in raw.into_iter().enumerate() {
            check_arm_digests(&attributes, &baseline, &optimized)?;
            let baseline_mean_s = arm_mean(&baseline)?;
            let optimized_mean_s = arm_mean(&optimized)?;
            levels.push(CumulativeLevel {
                k: k + 1,
                attributes,
                baseline_mean_s,
                optimized_mean_s,
                improvement_pct: improvement_pct(baseline_mean_s, optimized_mean_s)?,
                baseline,
                optimized,
            });
        }
        Ok(Self { repeats, levels })
    }
}

impl TrialSuiteResult {
    /// Builds the suite summary from raw per-attribute timings, checking
    /// digest agreement between arms.
    pub fn from_raw(
        trials: usize,
        raw: Vec<(String, Vec<TrialTiming>, Vec<TrialTiming>)>,
    ) -> Result<Self, BenchError> {
        if raw.is_empty() {
            return Err(BenchError::InconsistentInputs(
                "trial suite has no attributes".into(),
            ));
        }
        let mut attributes = Vec::with_capacity(raw.len());
        let mut all_pairs = Vec::new();
        let mut all_baseline = Vec::new();
        let mut all_optimized = Vec::new();
        for (attribute, baseline, optimized) in raw {
            check_arm_digests(std::slice::from_ref(&attribute), &baseline, &optimized)?;
            if baseline.len() != optimized.len() {
                return Err(BenchError::InconsistentInputs(format!(
                    "attribute {attribute:?} has {} baseline but {} optimized trials",
                    baseline.len(),
                    optimized.len()
                )));
            }
            let pairs: Vec<(f64, f64)> = baseline
                .iter()
                .zip(&optimized)
                .map(|(b, o)| (b.wall_seconds, o.wall_seconds))
                .collect();
            all_pairs.extend_from_slice(&pairs);
            all_baseline.extend(baseline.iter().map(|t| t.wall_seconds));
            all_optimized.extend(optimized.iter().map(|t| t.wall_seconds));

            let baseline_mean_s = arm_mean(&baseline)?;
            let optimized_mean_s = arm_mean(&optimized)?;
            attributes.push(AttributeTrials {
                attribute,
                baseline_mean_s,
                optimized_mean_s,
                mean_improvement_pct: mean_improvement(&pairs)?,
                improvement_pct_of_means: improvement_pct(baseline_mean_s, optimized_mean_s)?,
                baseline,
                optimized,
            });
        }
        let pooled_baseline = SampleStats::from_slice(&all_baseline)?.mean;
        let pooled_optimized = SampleStats::from_slice(&all_optimized)?.mean;
        Ok(Self {
            trials,
            attributes,
            mean_improvement_pct: mean_improvement(&all_pairs)?,
            improvement_pct_of_means: improvement_pct(pooled_baseline, pooled_optimized)?,
        })
    }
}

fn arm_mean(timings: &[TrialTiming]) -> Result<f64, BenchError> {
    if timings.is_empty() {
        return Err(BenchError::InconsistentInputs("empty timing arm".into()));
    }
    for t in timings {
        if !t.wall_seconds.is_finite() || t.wall_seconds < 0.0 {
            return Err(BenchError::InconsistentInputs(format!(
                "non-physical wall time {}",
                t.wall_seconds
            )));
        }
    }
    let seconds: Vec<f64> = timings.iter().map(|t| t.wall_seconds).collect();
    Ok(SampleStats::from_slice(&seconds)?.mean)
}

/// Every timing in both arms must carry the same digest; the baseline's
/// first digest is the reference.
fn check_arm_digests(
    attributes: &[String],
    baseline: &[TrialTiming],
    optimized: &[TrialTiming],
) -> Result<(), BenchError> {
    let reference = match baseline.first() {
        Some(t) => &t.counts_digest,
        None => return Err(BenchError::InconsistentInputs("empty baseline arm".into())),
    };
    for t in baseline.iter().chain(optimized) {
        if &t.counts_digest != reference {
            return Err(BenchError::DigestMismatch {
                attributes: attributes.join(", "),
                trial: t.trial_index,
                baseline: reference.clone(),
                optimized: t.counts_digest.clone(),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Suite runners
// ---------------------------------------------------------------------------

/// Runs baseline and optimized arms over attribute prefixes of size 1..K,
/// `repeats` timed runs per arm per prefix.
pub fn run_cumulative_suite(
    ds: &Dataset,
    ordered_attrs: &[String],
    strategy_opt: &ExecutionStrategy,
    repeats: usize,
) -> Result<CumulativeSuiteResult, BenchError> {
    run_cumulative_suite_impl(ds, ordered_attrs, strategy_opt, repeats, false)
}

pub(crate) fn run_cumulative_suite_impl(
    ds: &Dataset,
    ordered_attrs: &[String],
    strategy_opt: &ExecutionStrategy,
    repeats: usize,
    corrupt_optimized_digest: bool,
) -> Result<CumulativeSuiteResult, BenchError> {
    check_optimized_strategy(strategy_opt)?;
    if repeats < 1 {
        return Err(BenchError::InsufficientTrials {
            what: "repeat per arm",
            min: 1,
            got: repeats,
        });
    }
    let mut raw = Vec::with_capacity(ordered_attrs.len());
    for k in 1..=ordered_attrs.len() {
        let prefix = ordered_attrs[..k].to_vec();
        let baseline = run_arm(
            ds,
            &prefix,
            &ExecutionStrategy::Sequential,
            Arm::Baseline,
            repeats,
            false,
        )?;
        let optimized = run_arm(
            ds,
            &prefix,
            strategy_opt,
            Arm::Optimized,
            repeats,
            corrupt_optimized_digest,
        )?;
        raw.push((prefix, baseline, optimized));
    }
    CumulativeSuiteResult::from_raw(repeats, raw)
}

/// Runs baseline and optimized arms on each attribute independently,
/// `trials` timed runs per arm.
pub fn run_trial_suite(
    ds: &Dataset,
    single_attrs: &[String],
    strategy_opt: &ExecutionStrategy,
    trials: usize,
) -> Result<TrialSuiteResult, BenchError> {
    run_trial_suite_impl(ds, single_attrs, strategy_opt, trials, false)
}

pub(crate) fn run_trial_suite_impl(
    ds: &Dataset,
    single_attrs: &[String],
    strategy_opt: &ExecutionStrategy,
    trials: usize,
    corrupt_optimized_digest: bool,
) -> Result<TrialSuiteResult, BenchError> {
    check_optimized_strategy(strategy_opt)?;
    if trials < 2 {
        return Err(BenchError::InsufficientTrials {
            what: "trials per arm (the means test needs variance)",
            min: 2,
            got: trials,
        });
    }
    let mut raw = Vec::with_capacity(single_attrs.len());
    for attr in single_attrs {
        let names = vec![attr.clone()];
        let baseline = run_arm(
            ds,
            &names,
            &ExecutionStrategy::Sequential,
            Arm::Baseline,
            trials,
            false,
        )?;
        let optimized = run_arm(
            ds,
            &names,
            strategy_opt,
            Arm::Optimized,
            trials,
            corrupt_optimized_digest,
        )?;
        raw.push((attr.clone(), baseline, optimized));
    }
    TrialSuiteResult::from_raw(trials, raw)
}

fn check_optimized_strategy(strategy: &ExecutionStrategy) -> Result<(), BenchError> {
    if matches!(strategy, ExecutionStrategy::Sequential) {
        return Err(BenchError::StrategyIsSequential);
    }
    strategy.validate().map_err(BenchError::from)
}

/// One untimed warm-up run, then `times` timed runs of the same counting
/// call. Trials run strictly one after another.
fn run_arm(
    ds: &Dataset,
    attrs: &[String],
    strategy: &ExecutionStrategy,
    arm: Arm,
    times: usize,
    corrupt_digest: bool,
) -> Result<Vec<TrialTiming>, BenchError> {
    count_many(ds, attrs, strategy)?;
    let mut timings = Vec::with_capacity(times);
    for trial_index in 1..=times {
        let (tables, wall_seconds) = measure(|| count_many(ds, attrs, strategy));
        let tables = tables?;
        let mut counts_digest = digest_tables(&tables);
        if corrupt_digest {
            // Fault-injection hook for exercising the digest-mismatch path.
            counts_digest.push_str("-corrupted");
        }
        timings.push(TrialTiming {
            arm,
            strategy: strategy.clone(),
            attributes: attrs.to_vec(),
            wall_seconds,
            counts_digest,
            trial_index,
        });
    }
    Ok(timings)
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub row_count: usize,
    pub attributes: Vec<String>,
}

impl DatasetSummary {
    pub fn of(ds: &Dataset) -> Self {
        Self {
            row_count: ds.row_count(),
            attributes: ds.schema().names().to_vec(),
        }
    }
}

/// The only nondeterministic block in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentInfo {
    pub hardware_parallelism: usize,
    pub threads_override: Option<usize>,
    pub timestamp: String,
}

impl EnvironmentInfo {
    pub fn capture() -> Self {
        let threads_override = std::env::var("FREQBENCH_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n >= 1);
        Self {
            // The machine's real thread count; worker defaults honor the
            // override, recorded separately.
            hardware_parallelism: std::thread::available_parallelism()
                .map_or(1, std::num::NonZeroUsize::get),
            threads_override,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// Full benchmark output. Serializes as JSON with a stable key order; every
/// derived number can be recomputed from the stored raw timings (see
/// [`BenchmarkReport::verify`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub schema_version: String,
    pub dataset: DatasetSummary,
    pub cumulative_suite: Option<CumulativeSuiteResult>,
    pub trial_suite: Option<TrialSuiteResult>,
    /// Welch test over all baseline wall times vs all optimized wall times
    /// recorded in the report; present when both arms have two or more.
    pub means_test: Option<MeansTestResult>,
    /// Declared formula conventions the numbers in this report follow.
    pub conventions: Vec<String>,
    pub environment: EnvironmentInfo,
}

fn conventions() -> Vec<String> {
    vec![
        "improvement_pct = 100 * (baseline - optimized) / baseline".into(),
        "mean_improvement_pct = arithmetic mean of per-trial improvement \
         percentages; improvement_pct_of_means = improvement of the mean \
         runtimes (both reported)"
            .into(),
        "means test = Welch two-sample t-test, unequal variances, two-sided, \
         over all baseline vs all optimized wall times"
            .into(),
        "counts_digest = SHA-256 of the canonical JSON table serialization".into(),
    ]
}

/// Every wall time in the report, split by arm.
fn collect_arm_seconds(
    cumulative: Option<&CumulativeSuiteResult>,
    trial: Option<&TrialSuiteResult>,
) -> (Vec<f64>, Vec<f64>) {
    let mut baseline = Vec::new();
    let mut optimized = Vec::new();
    if let Some(suite) = cumulative {
        for level in &suite.levels {
            baseline.extend(level.baseline.iter().map(|t| t.wall_seconds));
            optimized.extend(level.optimized.iter().map(|t| t.wall_seconds));
        }
    }
    if let Some(suite) = trial {
        for attr in &suite.attributes {
            baseline.extend(attr.baseline.iter().map(|t| t.wall_seconds));
            optimized.extend(attr.optimized.iter().map(|t| t.wall_seconds));
        }
    }
    (baseline, optimized)
}

/// Stitches suite results into a [`BenchmarkReport`], computing the pooled
/// means test when enough timings exist.
pub fn assemble_report(
    dataset: DatasetSummary,
    cumulative_suite: Option<CumulativeSuiteResult>,
    trial_suite: Option<TrialSuiteResult>,
    alpha: f64,
    environment: EnvironmentInfo,
) -> Result<BenchmarkReport, BenchError> {
    let (baseline, optimized) =
        collect_arm_seconds(cumulative_suite.as_ref(), trial_suite.as_ref());
    if baseline.is_empty() && optimized.is_empty() {
        return Err(BenchError::InconsistentInputs(
            "report needs at least one suite with timings".into(),
        ));
    }
    for name in cumulative_suite
        .iter()
        .flat_map(|s| &s.levels)
        .flat_map(|l| &l.attributes)
        .chain(
            trial_suite
                .iter()
                .flat_map(|s| &s.attributes)
                .map(|a| &a.attribute),
        )
    {
        if !dataset.attributes.contains(name) {
            return Err(BenchError::InconsistentInputs(format!(
                "suite references attribute {name:?} absent from the dataset"
            )));
        }
    }
    let means_test = if baseline.len() >= 2 && optimized.len() >= 2 {
        Some(welch_t_test(&baseline, &optimized, alpha)?)
    } else {
        None
    };
    Ok(BenchmarkReport {
        schema_version: REPORT_SCHEMA_VERSION.to_string(),
        dataset,
        cumulative_suite,
        trial_suite,
        means_test,
        conventions: conventions(),
        environment,
    })
}

impl BenchmarkReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Recomputes every derived number from the stored raw timings and
    /// checks it against the stored value within [`RECOMPUTE_TOLERANCE`]
    /// (relative). Also re-checks digest agreement.
    pub fn verify(&self) -> Result<(), BenchError> {
        if self.schema_version != REPORT_SCHEMA_VERSION {
            return Err(BenchError::InconsistentInputs(format!(
                "unknown schema version {:?}",
                self.schema_version
            )));
        }
        if let Some(suite) = &self.cumulative_suite {
            let raw = suite
                .levels
                .iter()
                .map(|l| {
                    (
                        l.attributes.clone(),
                        l.baseline.clone(),
                        l.optimized.clone(),
                    )
                })
                .collect();
            let recomputed = CumulativeSuiteResult::from_raw(suite.repeats, raw)?;
            for (stored, fresh) in suite.levels.iter().zip(&recomputed.levels) {
                check_close(
                    "baseline_mean_s",
                    stored.baseline_mean_s,
                    fresh.baseline_mean_s,
                )?;
                check_close(
                    "optimized_mean_s",
                    stored.optimized_mean_s,
                    fresh.optimized_mean_s,
                )?;
                check_close(
                    "improvement_pct",
                    stored.improvement_pct,
                    fresh.improvement_pct,
                )?;
            }
        }
        if let Some(suite) = &self.trial_suite {
            let raw = suite
                .attributes
                .iter()
                .map(|a| (a.attribute.clone(), a.baseline.clone(), a.optimized.clone()))
                .collect();
            let recomputed = TrialSuiteResult::from_raw(suite.trials, raw)?;
            for (stored, fresh) in suite.attributes.iter().zip(&recomputed.attributes) {
                check_close(
                    "baseline_mean_s",
                    stored.baseline_mean_s,
                    fresh.baseline_mean_s,
                )?;
                check_close(
                    "optimized_mean_s",
                    stored.optimized_mean_s,
                    fresh.optimized_mean_s,
                )?;
                check_close(
                    "mean_improvement_pct",
                    stored.mean_improvement_pct,
                    fresh.mean_improvement_pct,
                )?;
                check_close(
                    "improvement_pct_of_means",
                    stored.improvement_pct_of_means,
                    fresh.improvement_pct_of_means,
                )?;
            }
            check_close(
                "suite mean_improvement_pct",
                suite.mean_improvement_pct,
                recomputed.mean_improvement_pct,
            )?;
            check_close(
                "suite improvement_pct_of_means",
                suite.improvement_pct_of_means,
                recomputed.improvement_pct_of_means,
            )?;
        }
        if let Some(stored) = &self.means_test {
            let (baseline, optimized) =
                collect_arm_seconds(self.cumulative_suite.as_ref(), self.trial_suite.as_ref());
            let fresh = welch_t_test(&baseline, &optimized, stored.alpha)?;
            check_close("t_statistic", stored.t_statistic, fresh.t_statistic)?;
            check_close(
                "degrees_of_freedom",
                stored.degrees_of_freedom,
                fresh.degrees_of_freedom,
            )?;
            check_close("p_value", stored.p_value, fresh.p_value)?;
            if stored.reject_null != fresh.reject_null {
                return Err(BenchError::InconsistentInputs(
                    "stored means-test verdict does not recompute".into(),
                ));
            }
        }
        Ok(())
    }
}

fn check_close(field: &str, stored: f64, fresh: f64) -> Result<(), BenchError> {
    let scale = stored.abs().max(fresh.abs()).max(1.0);
    if (stored - fresh).abs() > RECOMPUTE_TOLERANCE * scale {
        return Err(BenchError::InconsistentInputs(format!(
            "{field} does not recompute: stored {stored}, recomputed {fresh}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Plot-data export
// ---------------------------------------------------------------------------

/// Writes `cumulative.csv`: one row per prefix size with mean arm times and
/// the improvement percentage.
pub fn write_cumulative_csv(
    suite: &CumulativeSuiteResult,
    path: &Path,
) -> Result<(), std::io::Error> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["k", "baseline_s", "optimized_s", "improvement_pct"])?;
    for level in &suite.levels {
        wtr.write_record([
            level.k.to_string(),
            format!("{}", level.baseline_mean_s),
            format!("{}", level.optimized_mean_s),
            format!("{}", level.improvement_pct),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes `trials.csv`: one row per recorded timing.
pub fn write_trials_csv(suite: &TrialSuiteResult, path: &Path) -> Result<(), std::io::Error> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["attribute", "trial", "arm", "seconds"])?;
    for attr in &suite.attributes {
        for t in attr.baseline.iter().chain(&attr.optimized) {
            wtr.write_record([
                attr.attribute.clone(),
                t.trial_index.to_string(),
                t.arm.to_string(),
                format!("{}", t.wall_seconds),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}
