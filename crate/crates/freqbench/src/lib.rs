//! Categorical frequency counting over delimited datasets, with sequential
//! and multithreaded execution strategies, plus a benchmark harness that
//! times both and compares them statistically.
//!
//! The pieces:
//!
//! - [`dataset`]: immutable columnar store loaded from delimited text
//! - [`counter`]: per-attribute frequency tables under a chosen
//!   [`counter::ExecutionStrategy`]; results are bit-identical across
//!   strategies
//! - [`stats`]: improvement percentages and Welch's two-sample means test
//! - [`bench`]: cumulative and repeated-trial timing suites producing a
//!   verifiable JSON report
//! - [`synth`]: seeded synthetic vital-events data with configurable
//!   categorical distributions
//! - [`cli`]: the `freqbench` command-line tool wiring it all together
//!
//! ```
//! use freqbench::counter::{count_many, ExecutionStrategy};
//! use freqbench::synth::{default_vitals_spec, generate};
//!
//! let ds = generate(&default_vitals_spec(1_000, 42)).unwrap();
//! let names = vec!["sex".to_string(), "vital_event".to_string()];
//! let sequential = count_many(&ds, &names, &ExecutionStrategy::Sequential).unwrap();
//! let threaded = count_many(
//!     &ds,
//!     &names,
//!     &ExecutionStrategy::PerAttribute { max_workers: 2 },
//! )
//! .unwrap();
//! assert_eq!(sequential, threaded);
//! ```

pub mod bench;
pub mod cli;
pub mod counter;
pub mod dataset;
pub mod stats;
pub mod synth;

pub use bench::{BenchmarkReport, TrialTiming};
pub use counter::{ExecutionStrategy, FrequencyTable};
pub use dataset::{AttributeSchema, Dataset};
pub use stats::MeansTestResult;
pub use synth::SyntheticSpec;
