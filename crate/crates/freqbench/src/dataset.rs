//! Immutable columnar storage for delimited categorical data.
//!
//! A [`Dataset`] is loaded once from delimited text (CSV by default) and
//! never mutated afterwards, so any number of counting workers can scan its
//! columns concurrently without synchronization. Values are opaque
//! categorical strings: fields are trimmed of surrounding whitespace on
//! ingest and empty fields are replaced by the `"(empty)"` sentinel so that
//! every value is a well-defined counting key.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Sentinel stored in place of a field that is empty after trimming.
pub const EMPTY_SENTINEL: &str = "(empty)";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed row at line {line}: expected {expected} fields, found {found}")]
    MalformedRow {
        /// 1-based physical line number where the offending record starts.
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("input is not valid UTF-8 (line {line})")]
    EncodingError { line: u64 },

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("unknown attribute {name:?} (available: {})", available.join(", "))]
    UnknownAttribute {
        name: String,
        available: Vec<String>,
    },
}

/// Ordered list of unique, non-empty attribute names.
///
/// The order matches the header row of the source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeSchema {
    attributes: Vec<String>,
}

impl AttributeSchema {
    /// Builds a schema, rejecting empty or duplicate names.
    pub fn new<I, S>(names: I) -> Result<Self, DatasetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let attributes: Vec<String> = names.into_iter().map(Into::into).collect();
        if attributes.is_empty() {
            return Err(DatasetError::InvalidSchema("no attributes".into()));
        }
        for (i, name) in attributes.iter().enumerate() {
            if name.is_empty() {
                return Err(DatasetError::InvalidSchema(format!(
                    "attribute {} has an empty name",
                    i + 1
                )));
            }
            if attributes[..i].contains(name) {
                return Err(DatasetError::InvalidSchema(format!(
                    "duplicate attribute name {name:?}"
                )));
            }
        }
        Ok(Self { attributes })
    }

    pub fn names(&self) -> &[String] {
        &self.attributes
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    /// Position of `name` in the schema, if present.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a == name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index_of(name).is_some()
    }
}

/// Column-major table of categorical string values.
///
/// Immutable after construction; columns are plain `Vec<String>` slices that
/// are safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    schema: AttributeSchema,
    columns: Vec<Vec<String>>,
    row_count: usize,
}

impl Dataset {
    /// Assembles a dataset from pre-built columns (one per schema attribute,
    /// all of equal length).
    pub fn from_columns(
        schema: AttributeSchema,
        columns: Vec<Vec<String>>,
    ) -> Result<Self, DatasetError> {
        if columns.len() != schema.len() {
            return Err(DatasetError::InvalidSchema(format!(
                "{} columns provided for {} attributes",
                columns.len(),
                schema.len()
            )));
        }
        let row_count = columns.first().map_or(0, Vec::len);
        for (i, col) in columns.iter().enumerate() {
            if col.len() != row_count {
                return Err(DatasetError::InvalidSchema(format!(
                    "column {:?} has {} rows, expected {}",
                    schema.names()[i],
                    col.len(),
                    row_count
                )));
            }
        }
        Ok(Self {
            schema,
            columns,
            row_count,
        })
    }

    pub fn schema(&self) -> &AttributeSchema {
        &self.schema
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    /// Full value sequence for one attribute, in row order.
    pub fn column(&self, name: &str) -> Result<&[String], DatasetError> {
        match self.schema.index_of(name) {
            Some(idx) => Ok(&self.columns[idx]),
            None => Err(DatasetError::UnknownAttribute {
                name: name.to_string(),
                available: self.schema.names().to_vec(),
            }),
        }
    }

    /// Writes the dataset back out as delimited text: UTF-8, LF line endings,
    /// fields quoted only when they contain the delimiter, a quote, or a
    /// newline. The header row is always emitted.
    pub fn write_delimited(&self, path: &Path, delimiter: u8) -> Result<(), DatasetError> {
        let file = File::create(path).map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut out = BufWriter::new(file);
        self.write_delimited_to(&mut out, delimiter)
            .map_err(|source| DatasetError::Io {
                path: path.to_path_buf(),
                source,
            })?;
        out.flush().map_err(|source| DatasetError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Same as [`write_delimited`](Self::write_delimited) but to any writer.
    pub fn write_delimited_to<W: Write>(&self, out: W, delimiter: u8) -> io::Result<()> {
        let mut wtr = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .quote_style(csv::QuoteStyle::Necessary)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        wtr.write_record(self.schema.names())?;
        for row in 0..self.row_count {
            wtr.write_record(self.columns.iter().map(|col| col[row].as_str()))?;
        }
        wtr.flush()
    }

    /// The dataset rendered as a delimited string (used by tests and the
    /// generator's file output).
    pub fn to_delimited_string(&self, delimiter: u8) -> String {
        let mut buf = Vec::new();
        self.write_delimited_to(&mut buf, delimiter)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("writer only emits UTF-8")
    }
}

/// Loads delimited text into a [`Dataset`].
///
/// The schema comes from the header row when `has_header` is true, otherwise
/// names `attr_1..attr_k` are synthesized from the first row's field count.
/// Both LF and CRLF line endings are accepted; fields may be quoted
/// RFC-4180-style (double quotes, doubled quotes as escapes, embedded
/// delimiters and newlines).
pub fn load_delimited(
    path: &Path,
    delimiter: u8,
    has_header: bool,
) -> Result<Dataset, DatasetError> {
    let file = File::open(path).map_err(|source| {
        if source.kind() == io::ErrorKind::NotFound {
            DatasetError::FileNotFound(path.to_path_buf())
        } else {
            DatasetError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    load_delimited_from(BufReader::new(file), path, delimiter, has_header)
}

fn load_delimited_from<R: io::Read>(
    input: R,
    path: &Path,
    delimiter: u8,
    has_header: bool,
) -> Result<Dataset, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(has_header)
        .flexible(false)
        .from_reader(input);

    let mut schema: Option<AttributeSchema> = None;
    if has_header {
        let headers = rdr.headers().map_err(|e| map_csv_error(&e, path))?.clone();
        if !headers.is_empty() {
            schema = Some(AttributeSchema::new(
                headers.iter().map(|h| h.trim().to_string()),
            )?);
        }
        // A zero-field header record means an empty file; fall through so
        // the zero-row check below reports EmptyInput.
    }

    let mut columns: Vec<Vec<String>> = schema
        .as_ref()
        .map(|s| vec![Vec::new(); s.len()])
        .unwrap_or_default();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => return Err(map_csv_error(&e, path)),
        }
        if schema.is_none() {
            // Headerless input: synthesize names from the first row's width.
            let synthesized =
                AttributeSchema::new((1..=record.len()).map(|i| format!("attr_{i}")))?;
            columns = vec![Vec::new(); synthesized.len()];
            schema = Some(synthesized);
        }
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            col.push(normalize_field(field));
        }
    }

    let schema = schema.ok_or(DatasetError::EmptyInput)?;
    let dataset = Dataset::from_columns(schema, columns)?;
    if dataset.row_count() == 0 {
        return Err(DatasetError::EmptyInput);
    }
    Ok(dataset)
}

fn normalize_field(field: &str) -> String {
    let trimmed = field.trim();
    if trimmed.is_empty() {
        EMPTY_SENTINEL.to_string()
    } else {
        trimmed.to_string()
    }
}

fn map_csv_error(err: &csv::Error, path: &Path) -> DatasetError {
    match err.kind() {
        csv::ErrorKind::UnequalLengths {
            pos,
            expected_len,
            len,
        } => DatasetError::MalformedRow {
            line: pos.as_ref().map_or(0, csv::Position::line),
            expected: *expected_len as usize,
            found: *len as usize,
        },
        csv::ErrorKind::Utf8 { pos, .. } => DatasetError::EncodingError {
            line: pos.as_ref().map_or(0, csv::Position::line),
        },
        csv::ErrorKind::Io(_) => DatasetError::Io {
            path: path.to_path_buf(),
            source: io::Error::other(err.to_string()),
        },
        _ => DatasetError::Io {
            path: path.to_path_buf(),
            source: io::Error::new(io::ErrorKind::InvalidData, err.to_string()),
        },
    }
}
