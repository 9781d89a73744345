//! Frequency counting engine with pluggable execution strategies.
//!
//! Counting one attribute means scanning its column once and tallying each
//! distinct value. The engine can do that sequentially, fan attributes out
//! across worker threads, split a single column into row chunks counted in
//! parallel, or both at once. Every strategy produces bit-identical tables:
//! each worker tallies into a private partial table and the partials are
//! merged only after all workers finish, so there is no shared mutable
//! state and no ordering sensitivity.

use std::collections::{BTreeMap, HashMap};
use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{Dataset, DatasetError};

/// Minimum row-chunk size; smaller chunks cost more in scheduling than they
/// recover in balance.
pub const MIN_CHUNK_ROWS: usize = 1024;

#[derive(Debug, Error)]
pub enum CounterError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),

    #[error("duplicate attribute {0:?} in request")]
    DuplicateAttribute(String),

    #[error("no attributes requested")]
    EmptyAttributes,

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("cannot merge tables for different attributes: {expected:?} vs {found:?}")]
    MixedAttributes { expected: String, found: String },

    #[error("cannot merge an empty list of tables")]
    EmptyMerge,
}

/// Occurrence count of each distinct value within one attribute's column.
///
/// Serializes as `{"attribute": name, "counts": {value: count, ...}}` with
/// keys in lexicographic order; this is the canonical form used for digests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    attribute: String,
    counts: BTreeMap<String, u64>,
}

impl FrequencyTable {
    /// Empty table for `attribute`; the identity element of [`merge`].
    pub fn new(attribute: impl Into<String>) -> Self {
        Self {
            attribute: attribute.into(),
            counts: BTreeMap::new(),
        }
    }

    /// Builds a table from explicit counts. Zero entries are dropped so the
    /// no-zero-counts invariant holds regardless of input.
    pub fn from_counts(attribute: impl Into<String>, counts: BTreeMap<String, u64>) -> Self {
        Self {
            attribute: attribute.into(),
            counts: counts.into_iter().filter(|&(_, c)| c > 0).collect(),
        }
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Count for one value (zero when absent).
    pub fn get(&self, value: &str) -> u64 {
        self.counts.get(value).copied().unwrap_or(0)
    }

    /// Sum of all counts; equals the dataset's row count for a full scan.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("table serialization cannot fail")
    }
}

/// Canonical JSON for an ordered list of tables (array of canonical tables).
pub fn tables_canonical_json(tables: &[FrequencyTable]) -> String {
    serde_json::to_string(tables).expect("table serialization cannot fail")
}

/// How counting work is partitioned across threads.
///
/// `Sequential`, `PerAttribute { max_workers: 1 }` and
/// `RowChunks { workers: 1, .. }` all run single-threaded and are
/// result-equivalent; every strategy is result-equivalent to `Sequential`
/// by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExecutionStrategy {
    /// One thread scans each requested attribute in turn.
    Sequential,
    /// Attributes are distributed across up to `max_workers` threads.
    PerAttribute { max_workers: usize },
    /// Each column is split into `chunk`-row slices counted by `workers`
    /// threads, with partial tables merged afterwards.
    RowChunks { workers: usize, chunk: usize },
    /// Both axes: attributes across `attribute_workers` threads, each column
    /// chunked across `chunk_workers` threads.
    Hybrid {
        attribute_workers: usize,
        chunk_workers: usize,
    },
}

impl ExecutionStrategy {
    /// One worker per requested attribute, capped at the detected hardware
    /// parallelism.
    pub fn per_attribute_default(requested_attributes: usize) -> Self {
        ExecutionStrategy::PerAttribute {
            max_workers: requested_attributes.min(detected_parallelism()).max(1),
        }
    }

    /// Row-chunked parallelism over all detected hardware threads with the
    /// default chunk size for `row_count`.
    pub fn row_chunks_default(row_count: usize) -> Self {
        let workers = detected_parallelism();
        ExecutionStrategy::RowChunks {
            workers,
            chunk: default_chunk_size(row_count, workers),
        }
    }

    pub fn validate(&self) -> Result<(), CounterError> {
        match *self {
            ExecutionStrategy::Sequential => Ok(()),
            ExecutionStrategy::PerAttribute { max_workers: 0 } => Err(
                CounterError::InvalidStrategy("per-attribute max_workers must be >= 1".into()),
            ),
            ExecutionStrategy::RowChunks { workers, chunk } => {
                if workers == 0 {
                    Err(CounterError::InvalidStrategy(
                        "row-chunks workers must be >= 1".into(),
                    ))
                } else if chunk == 0 {
                    Err(CounterError::InvalidStrategy(
                        "row-chunks chunk size must be >= 1".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            ExecutionStrategy::Hybrid {
                attribute_workers,
                chunk_workers,
            } if attribute_workers == 0 || chunk_workers == 0 => Err(
                CounterError::InvalidStrategy("hybrid worker counts must be >= 1".into()),
            ),
            _ => Ok(()),
        }
    }

    /// Short human-readable form for logs and summaries.
    pub fn describe(&self) -> String {
        match *self {
            ExecutionStrategy::Sequential => "sequential".to_string(),
            ExecutionStrategy::PerAttribute { max_workers } => {
                format!("per-attribute(max_workers={max_workers})")
            }
            ExecutionStrategy::RowChunks { workers, chunk } => {
                format!("row-chunks(workers={workers}, chunk={chunk})")
            }
            ExecutionStrategy::Hybrid {
                attribute_workers,
                chunk_workers,
            } => format!(
                "hybrid(attribute_workers={attribute_workers}, chunk_workers={chunk_workers})"
            ),
        }
    }
}

/// Chunk size balancing scheduling overhead against load imbalance:
/// `row_count / (4 * workers)`, floored at [`MIN_CHUNK_ROWS`].
pub fn default_chunk_size(row_count: usize, workers: usize) -> usize {
    (row_count / (4 * workers.max(1))).max(MIN_CHUNK_ROWS)
}

/// Detected hardware parallelism, overridable via the `FREQBENCH_THREADS`
/// environment variable (positive integer).
pub fn detected_parallelism() -> usize {
    if let Ok(v) = std::env::var("FREQBENCH_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n >= 1 {
                return n;
            }
        }
    }
    thread::available_parallelism()
        .map(NonZeroUsize::get)
        .unwrap_or(1)
}

/// Counts occurrences of each distinct value in one attribute's column.
pub fn count_attribute(ds: &Dataset, name: &str) -> Result<FrequencyTable, CounterError> {
    let column = ds.column(name)?;
    Ok(FrequencyTable {
        attribute: name.to_string(),
        counts: count_column(column),
    })
}

/// Counts several attributes under `strategy`.
///
/// The result order matches `names`; the strategy affects timing only, never
/// the tables.
pub fn count_many(
    ds: &Dataset,
    names: &[String],
    strategy: &ExecutionStrategy,
) -> Result<Vec<FrequencyTable>, CounterError> {
    strategy.validate()?;
    if names.is_empty() {
        return Err(CounterError::EmptyAttributes);
    }
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(CounterError::DuplicateAttribute(name.clone()));
        }
    }
    // Resolve all columns up front so workers cannot fail mid-flight.
    let columns: Vec<&[String]> = names
        .iter()
        .map(|n| ds.column(n))
        .collect::<Result<_, _>>()?;

    let tables = match *strategy {
        ExecutionStrategy::Sequential => count_columns_sequential(names, &columns),
        ExecutionStrategy::PerAttribute { max_workers } => {
            let workers = max_workers.min(names.len());
            if workers <= 1 {
                count_columns_sequential(names, &columns)
            } else {
                count_columns_striped(names, &columns, workers, count_column)
            }
        }
        ExecutionStrategy::RowChunks { workers, chunk } => names
            .iter()
            .zip(&columns)
            .map(|(name, col)| FrequencyTable {
                attribute: name.clone(),
                counts: count_column_chunked(name, col, workers, chunk),
            })
            .collect(),
        ExecutionStrategy::Hybrid {
            attribute_workers,
            chunk_workers,
        } => {
            let workers = attribute_workers.min(names.len());
            let chunk = default_chunk_size(ds.row_count(), chunk_workers);
            count_columns_striped(names, &columns, workers.max(1), move |col| {
                count_column_chunked("partial", col, chunk_workers, chunk)
            })
        }
    };
    Ok(tables)
}

/// Key-wise sum of partial tables for the same attribute. Associative and
/// commutative; the empty table is the identity.
pub fn merge(partials: &[FrequencyTable]) -> Result<FrequencyTable, CounterError> {
    let first = partials.first().ok_or(CounterError::EmptyMerge)?;
    let mut counts = first.counts.clone();
    for t in &partials[1..] {
        if t.attribute != first.attribute {
            return Err(CounterError::MixedAttributes {
                expected: first.attribute.clone(),
                found: t.attribute.clone(),
            });
        }
        for (value, n) in &t.counts {
            *counts.entry(value.clone()).or_insert(0) += n;
        }
    }
    Ok(FrequencyTable {
        attribute: first.attribute.clone(),
        counts,
    })
}

/// Single scan of a column. The hot loop tallies borrowed keys into a hash
/// map; the sorted map is built once at the end from the distinct values.
fn count_column(column: &[String]) -> BTreeMap<String, u64> {
    let mut tally: HashMap<&str, u64> = HashMap::new();
    for value in column {
        *tally.entry(value.as_str()).or_insert(0) += 1;
    }
    tally
        .into_iter()
        .map(|(value, n)| (value.to_string(), n))
        .collect()
}

fn count_columns_sequential(names: &[String], columns: &[&[String]]) -> Vec<FrequencyTable> {
    names
        .iter()
        .zip(columns)
        .map(|(name, col)| FrequencyTable {
            attribute: name.clone(),
            counts: count_column(col),
        })
        .collect()
}

/// Distributes whole columns across `workers` threads via an atomic cursor;
/// `count` produces the counts for one column.
fn count_columns_striped<F>(
    names: &[String],
    columns: &[&[String]],
    workers: usize,
    count: F,
) -> Vec<FrequencyTable>
where
    F: Fn(&[String]) -> BTreeMap<String, u64> + Sync,
{
    let cursor = AtomicUsize::new(0);
    let mut tables: Vec<Option<FrequencyTable>> = names.iter().map(|_| None).collect();
    thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut mine = Vec::new();
                    loop {
                        let i = cursor.fetch_add(1, Ordering::Relaxed);
                        if i >= columns.len() {
                            break;
                        }
                        mine.push((
                            i,
                            FrequencyTable {
                                attribute: names[i].clone(),
                                counts: count(columns[i]),
                            },
                        ));
                    }
                    mine
                })
            })
            .collect();
        for handle in handles {
            for (i, table) in handle.join().expect("counting worker panicked") {
                tables[i] = Some(table);
            }
        }
    });
    tables
        .into_iter()
        .map(|t| t.expect("all columns counted"))
        .collect()
}

/// Counts one column by splitting it into `chunk`-row slices pulled by
/// `workers` threads. Each worker owns a private partial table; the partials
/// go through [`merge`] after every worker has finished.
fn count_column_chunked(
    attribute: &str,
    column: &[String],
    workers: usize,
    chunk: usize,
) -> BTreeMap<String, u64> {
    if workers <= 1 || column.len() <= chunk {
        return count_column(column);
    }
    let chunks: Vec<&[String]> = column.chunks(chunk).collect();
    let cursor = AtomicUsize::new(0);
    let partials: Vec<FrequencyTable> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers.min(chunks.len()))
            .map(|_| {
                s.spawn(|| {
                    let mut tally: HashMap<&str, u64> = HashMap::new();
                    loop {
                        let i = cursor.fetch_add(1, Ordering::Relaxed);
                        if i >= chunks.len() {
                            break;
                        }
                        for value in chunks[i] {
                            *tally.entry(value.as_str()).or_insert(0) += 1;
                        }
                    }
                    FrequencyTable {
                        attribute: attribute.to_string(),
                        counts: tally
                            .into_iter()
                            .map(|(value, n)| (value.to_string(), n))
                            .collect(),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("chunk worker panicked"))
            .collect()
    });
    merge(&partials)
        .expect("partials share one attribute by construction")
        .counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::AttributeSchema;
    use proptest::prelude::*;

    fn dataset_of(columns: Vec<(&str, Vec<&str>)>) -> Dataset {
        let schema = AttributeSchema::new(columns.iter().map(|(n, _)| n.to_string())).unwrap();
        let cols = columns
            .into_iter()
            .map(|(_, vals)| vals.into_iter().map(String::from).collect())
            .collect();
        Dataset::from_columns(schema, cols).unwrap()
    }

    fn table(attr: &str, pairs: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable::from_counts(
            attr,
            pairs.iter().map(|&(v, c)| (v.to_string(), c)).collect(),
        )
    }

    /// Independent counting oracle: sort-and-run-length, no hash maps.
    fn oracle_count(column: &[String]) -> BTreeMap<String, u64> {
        let mut sorted: Vec<&str> = column.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        let mut out = BTreeMap::new();
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            out.insert(sorted[i].to_string(), (j - i) as u64);
            i = j;
        }
        out
    }

    #[test]
    fn counts_hand_checkable_column() {
        let ds = dataset_of(vec![("sex", vec!["M", "M", "F", "F", "F", "NA"])]);
        let t = count_attribute(&ds, "sex").unwrap();
        assert_eq!(t, table("sex", &[("M", 2), ("F", 3), ("NA", 1)]));
        assert_eq!(t.total(), 6);
    }

    #[test]
    fn repeated_value_counts_to_length() {
        let vals: Vec<&str> = std::iter::repeat_n("v", 97).collect();
        let ds = dataset_of(vec![("a", vals)]);
        let t = count_attribute(&ds, "a").unwrap();
        assert_eq!(t, table("a", &[("v", 97)]));
    }

    #[test]
    fn unknown_attribute_propagates() {
        let ds = dataset_of(vec![("a", vec!["x"])]);
        let err = count_attribute(&ds, "b").unwrap_err();
        assert!(matches!(
            err,
            CounterError::Dataset(DatasetError::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn strategy_invariance_on_tiny_input() {
        let ds = dataset_of(vec![("sex", vec!["M", "M", "F", "F", "F", "NA"])]);
        let names = vec!["sex".to_string()];
        let seq = count_many(&ds, &names, &ExecutionStrategy::Sequential).unwrap();
        let par = count_many(
            &ds,
            &names,
            &ExecutionStrategy::RowChunks {
                workers: 8,
                chunk: 1000,
            },
        )
        .unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn equal_columns_give_equal_tables() {
        let ds = dataset_of(vec![("a", vec!["x", "y", "x"]), ("b", vec!["x", "y", "x"])]);
        let names: Vec<String> = vec!["a".into(), "b".into()];
        let tables = count_many(&ds, &names, &ExecutionStrategy::Sequential).unwrap();
        assert_eq!(tables[0].counts(), tables[1].counts());
    }

    #[test]
    fn result_order_matches_request_order() {
        let ds = dataset_of(vec![("a", vec!["1"]), ("b", vec!["2"]), ("c", vec!["3"])]);
        let names: Vec<String> = vec!["c".into(), "a".into(), "b".into()];
        let tables = count_many(
            &ds,
            &names,
            &ExecutionStrategy::PerAttribute { max_workers: 3 },
        )
        .unwrap();
        let got: Vec<&str> = tables.iter().map(FrequencyTable::attribute).collect();
        assert_eq!(got, ["c", "a", "b"]);
    }

    #[test]
    fn duplicate_request_rejected() {
        let ds = dataset_of(vec![("a", vec!["x"])]);
        let names: Vec<String> = vec!["a".into(), "a".into()];
        let err = count_many(&ds, &names, &ExecutionStrategy::Sequential).unwrap_err();
        assert!(matches!(err, CounterError::DuplicateAttribute(_)));
    }

    #[test]
    fn empty_request_rejected() {
        let ds = dataset_of(vec![("a", vec!["x"])]);
        let err = count_many(&ds, &[], &ExecutionStrategy::Sequential).unwrap_err();
        assert!(matches!(err, CounterError::EmptyAttributes));
    }

    #[test]
    fn zero_workers_is_invalid_strategy() {
        let ds = dataset_of(vec![("a", vec!["x"])]);
        let names = vec!["a".to_string()];
        for strategy in [
            ExecutionStrategy::PerAttribute { max_workers: 0 },
            ExecutionStrategy::RowChunks {
                workers: 0,
                chunk: 10,
            },
            ExecutionStrategy::RowChunks {
                workers: 2,
                chunk: 0,
            },
            ExecutionStrategy::Hybrid {
                attribute_workers: 0,
                chunk_workers: 1,
            },
            ExecutionStrategy::Hybrid {
                attribute_workers: 1,
                chunk_workers: 0,
            },
        ] {
            let err = count_many(&ds, &names, &strategy).unwrap_err();
            assert!(
                matches!(err, CounterError::InvalidStrategy(_)),
                "{strategy:?}"
            );
        }
    }

    #[test]
    fn merge_sums_key_wise() {
        let merged = merge(&[table("a", &[("M", 2)]), table("a", &[("M", 1), ("F", 3)])]).unwrap();
        assert_eq!(merged, table("a", &[("M", 3), ("F", 3)]));
    }

    #[test]
    fn merge_single_table_is_identity() {
        let t = table("a", &[("x", 4), ("y", 1)]);
        assert_eq!(merge(std::slice::from_ref(&t)).unwrap(), t);
    }

    #[test]
    fn merge_rejects_mixed_attributes() {
        let err = merge(&[table("a", &[("x", 1)]), table("b", &[("x", 1)])]).unwrap_err();
        assert!(matches!(err, CounterError::MixedAttributes { .. }));
    }

    #[test]
    fn merge_rejects_empty_input() {
        assert!(matches!(merge(&[]), Err(CounterError::EmptyMerge)));
    }

    #[test]
    fn merged_chunk_partials_equal_whole_column_count() {
        let values: Vec<String> = (0..2500).map(|i| format!("v{}", i % 7)).collect();
        let partials: Vec<FrequencyTable> = values
            .chunks(400)
            .map(|c| FrequencyTable::from_counts("a", oracle_count(c)))
            .collect();
        let merged = merge(&partials).unwrap();
        assert_eq!(*merged.counts(), oracle_count(&values));
    }

    #[test]
    fn serialization_is_lexicographic() {
        let t = table("sex", &[("NA", 1), ("F", 3), ("M", 2)]);
        assert_eq!(
            t.canonical_json(),
            r#"{"attribute":"sex","counts":{"F":3,"M":2,"NA":1}}"#
        );
    }

    #[test]
    fn default_chunk_size_floors_at_minimum() {
        assert_eq!(default_chunk_size(100, 4), MIN_CHUNK_ROWS);
        assert_eq!(default_chunk_size(500_000, 4), 31_250);
    }

    fn arb_strategy() -> impl Strategy<Value = ExecutionStrategy> {
        prop_oneof![
            Just(ExecutionStrategy::Sequential),
            (1usize..8).prop_map(|w| ExecutionStrategy::PerAttribute { max_workers: w }),
            (1usize..8, 1usize..300).prop_map(|(w, c)| ExecutionStrategy::RowChunks {
                workers: w,
                chunk: c
            }),
            (1usize..4, 1usize..4).prop_map(|(a, c)| ExecutionStrategy::Hybrid {
                attribute_workers: a,
                chunk_workers: c,
            }),
        ]
    }

    fn arb_counted_dataset() -> impl Strategy<Value = (Dataset, Vec<String>)> {
        (1usize..5, 1usize..600).prop_flat_map(|(ncols, nrows)| {
            prop::collection::vec(prop::collection::vec(0u8..20, nrows..=nrows), ncols..=ncols)
                .prop_map(move |raw| {
                    let schema =
                        AttributeSchema::new((1..=ncols).map(|i| format!("c{i}"))).unwrap();
                    let columns: Vec<Vec<String>> = raw
                        .into_iter()
                        .map(|col| col.into_iter().map(|v| format!("v{v}")).collect())
                        .collect();
                    let names = schema.names().to_vec();
                    (Dataset::from_columns(schema, columns).unwrap(), names)
                })
        })
    }

    proptest! {
        // The primary property: every strategy matches the Sequential oracle
        // byte for byte.
        #[test]
        fn prop_strategy_invariance((ds, names) in arb_counted_dataset(), strategy in arb_strategy()) {
            let seq = count_many(&ds, &names, &ExecutionStrategy::Sequential).unwrap();
            let got = count_many(&ds, &names, &strategy).unwrap();
            prop_assert_eq!(tables_canonical_json(&got), tables_canonical_json(&seq));
        }

        #[test]
        fn prop_conservation((ds, names) in arb_counted_dataset(), strategy in arb_strategy()) {
            for t in count_many(&ds, &names, &strategy).unwrap() {
                prop_assert_eq!(t.total(), ds.row_count() as u64);
            }
        }

        // Shuffling rows never changes a frequency table.
        #[test]
        fn prop_permutation_invariance(values in prop::collection::vec(0u8..12, 1..200), seed in any::<u64>()) {
            let original: Vec<String> = values.iter().map(|v| format!("v{v}")).collect();
            let mut shuffled = original.clone();
            // Fisher-Yates with a splitmix step, no rng dependency needed here.
            let mut state = seed;
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_add(0x9E3779B97F4A7C15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
                z ^= z >> 31;
                shuffled.swap(i, (z as usize) % (i + 1));
            }
            prop_assert_eq!(count_column(&shuffled), count_column(&original));
        }

        // Merge is a commutative monoid with the empty table as identity.
        #[test]
        fn prop_merge_monoid(
            a in prop::collection::vec((0u8..10, 1u64..50), 0..8),
            b in prop::collection::vec((0u8..10, 1u64..50), 0..8),
            c in prop::collection::vec((0u8..10, 1u64..50), 0..8),
        ) {
            let to_table = |pairs: Vec<(u8, u64)>| {
                let mut m = BTreeMap::new();
                for (k, v) in pairs {
                    *m.entry(format!("k{k}")).or_insert(0) += v;
                }
                FrequencyTable::from_counts("attr", m)
            };
            let (ta, tb, tc) = (to_table(a), to_table(b), to_table(c));
            let identity = FrequencyTable::new("attr");

            let ab_c = merge(&[merge(&[ta.clone(), tb.clone()]).unwrap(), tc.clone()]).unwrap();
            let a_bc = merge(&[ta.clone(), merge(&[tb.clone(), tc.clone()]).unwrap()]).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);

            let ab = merge(&[ta.clone(), tb.clone()]).unwrap();
            let ba = merge(&[tb.clone(), ta.clone()]).unwrap();
            prop_assert_eq!(&ab, &ba);

            prop_assert_eq!(merge(&[ta.clone(), identity.clone()]).unwrap(), ta.clone());
            prop_assert_eq!(merge(&[identity, ta.clone()]).unwrap(), ta);
        }

        // count_column agrees with the sort-based oracle.
        #[test]
        fn prop_count_matches_oracle(values in prop::collection::vec(0u8..25, 0..400)) {
            let column: Vec<String> = values.iter().map(|v| format!("v{v}")).collect();
            prop_assert_eq!(count_column(&column), oracle_count(&column));
        }
    }
}
