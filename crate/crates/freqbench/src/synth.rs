//! Seeded synthetic vital-events data generation.
//!
//! Each cell of the output table is drawn independently: the PRNG is
//! SplitMix64 evaluated at the cell's index (`row * attribute_count +
//! attribute_index`) offset by the seed, so values never depend on
//! generation order and any row range can be produced in isolation.
//! Categories are sampled by inverse CDF over the spec's cumulative
//! probabilities in declared order. Changing this derivation scheme would
//! change every fixture, so it is part of the report schema contract.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{AttributeSchema, Dataset, DatasetError};

/// Tolerance for each attribute's probabilities summing to one.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("cannot read spec {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse spec: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// One categorical value and its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub value: String,
    pub p: f64,
}

/// Distribution for one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub categories: Vec<Category>,
}

/// Full description of a synthetic dataset: size, seed, and one categorical
/// distribution per attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub rows: u64,
    pub seed: u64,
    pub attributes: Vec<AttributeSpec>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.rows == 0 {
            return Err(SynthError::InvalidSpec("rows must be >= 1".into()));
        }
        if self.attributes.is_empty() {
            return Err(SynthError::InvalidSpec(
                "at least one attribute required".into(),
            ));
        }
        for (i, attr) in self.attributes.iter().enumerate() {
            if attr.name.is_empty() {
                return Err(SynthError::InvalidSpec(format!(
                    "attribute {} has an empty name",
                    i + 1
                )));
            }
            if self.attributes[..i].iter().any(|a| a.name == attr.name) {
                return Err(SynthError::InvalidSpec(format!(
                    "duplicate attribute name {:?}",
                    attr.name
                )));
            }
            if attr.categories.is_empty() {
                return Err(SynthError::InvalidSpec(format!(
                    "attribute {:?} has no categories",
                    attr.name
                )));
            }
            let mut sum = 0.0;
            for (j, cat) in attr.categories.iter().enumerate() {
                if !(0.0..=1.0).contains(&cat.p) {
                    return Err(SynthError::InvalidSpec(format!(
                        "attribute {:?} category {:?} has probability {} outside [0, 1]",
                        attr.name, cat.value, cat.p
                    )));
                }
                if attr.categories[..j].iter().any(|c| c.value == cat.value) {
                    return Err(SynthError::InvalidSpec(format!(
                        "attribute {:?} has duplicate category value {:?}",
                        attr.name, cat.value
                    )));
                }
                sum += cat.p;
            }
            if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
                return Err(SynthError::InvalidSpec(format!(
                    "attribute {:?} probabilities sum to {sum}, expected 1",
                    attr.name
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        let spec: SyntheticSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Loads and validates a spec file.
pub fn load_spec(path: &Path) -> Result<SyntheticSpec, SynthError> {
    let text = fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.display().to_string(),
        source,
    })?;
    SyntheticSpec::from_json(&text)
}

fn uniform_categories<I: IntoIterator<Item = String>>(values: I) -> Vec<Category> {
    let values: Vec<String> = values.into_iter().collect();
    let p = 1.0 / values.len() as f64;
    values
        .into_iter()
        .map(|value| Category { value, p })
        .collect()
}

/// The canonical nine-attribute vital-events spec.
///
/// Sex and vital-event proportions follow the observed distribution of the
/// source registry (44.16% male / 43.36% female / 12.48% not applicable;
/// 61.54% births / 25.98% deaths / 12.48% marriages). The remaining
/// attributes use uniform synthetic vocabularies shaped like the real
/// export: 11 years, 12 months, 3 registration types, 25 departments,
/// 10 provinces, 10 districts, 5 office codes.
pub fn default_vitals_spec(rows: u64, seed: u64) -> SyntheticSpec {
    let attributes = vec![
        AttributeSpec {
            name: "year".into(),
            categories: uniform_categories((2012..=2022).map(|y| y.to_string())),
        },
        AttributeSpec {
            name: "month".into(),
            categories: uniform_categories((1..=12).map(|m| format!("{m:02}"))),
        },
        AttributeSpec {
            name: "sex".into(),
            categories: vec![
                Category {
                    value: "male".into(),
                    p: 0.4416,
                },
                Category {
                    value: "female".into(),
                    p: 0.4336,
                },
                Category {
                    value: "not_applicable".into(),
                    p: 0.1248,
                },
            ],
        },
        AttributeSpec {
            name: "vital_event".into(),
            categories: vec![
                Category {
                    value: "birth".into(),
                    p: 0.6154,
                },
                Category {
                    value: "death".into(),
                    p: 0.2598,
                },
                Category {
                    value: "marriage".into(),
                    p: 0.1248,
                },
            ],
        },
        AttributeSpec {
            name: "registration_type".into(),
            categories: uniform_categories(["ordinary", "late", "judicial"].map(String::from)),
        },
        AttributeSpec {
            name: "department".into(),
            categories: uniform_categories((1..=25).map(|d| format!("dept_{d:02}"))),
        },
        AttributeSpec {
            name: "province".into(),
            categories: uniform_categories((1..=10).map(|p| format!("prov_{p:02}"))),
        },
        AttributeSpec {
            name: "district".into(),
            categories: uniform_categories((1..=10).map(|d| format!("dist_{d:02}"))),
        },
        AttributeSpec {
            name: "registration_office".into(),
            categories: uniform_categories((1..=5).map(|o| format!("office_{o}"))),
        },
    ];
    SyntheticSpec {
        rows,
        seed,
        attributes,
    }
}

/// SplitMix64 output for position `cell` of the stream keyed by `seed`,
/// mapped to a uniform double in [0, 1).
fn cell_uniform(seed: u64, cell: u64) -> f64 {
    let mut z = seed.wrapping_add(cell.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Materializes the spec as a [`Dataset`]. Deterministic in `(spec, seed)`;
/// row `i` is identical no matter how many rows surround it.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset, SynthError> {
    spec.validate()?;
    let rows = spec.rows as usize;
    let attr_count = spec.attributes.len() as u64;
    let schema = AttributeSchema::new(spec.attributes.iter().map(|a| a.name.clone()))?;

    let mut columns = Vec::with_capacity(spec.attributes.len());
    for (j, attr) in spec.attributes.iter().enumerate() {
        let mut cumulative = Vec::with_capacity(attr.categories.len());
        let mut acc = 0.0;
        for cat in &attr.categories {
            acc += cat.p;
            cumulative.push(acc);
        }
        let last = attr.categories.len() - 1;
        let mut column = Vec::with_capacity(rows);
        for i in 0..spec.rows {
            let u = cell_uniform(spec.seed, i * attr_count + j as u64);
            let idx = cumulative.partition_point(|&c| c <= u).min(last);
            column.push(attr.categories[idx].value.clone());
        }
        columns.push(column);
    }
    Ok(Dataset::from_columns(schema, columns)?)
}
