use std::collections::BTreeSet;
use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use arrow_array::cast::AsArray;
use arrow_array::types::{Float64Type, Int64Type, TimestampMicrosecondType};
use arrow_array::{Array, ArrayRef, RecordBatch, RecordBatchReader};
use arrow_cast::cast;
use arrow_schema::{DataType, Field, TimeUnit};
use parquet::arrow::arrow_reader::{ParquetRecordBatchReader, ParquetRecordBatchReaderBuilder};
use rayon::prelude::*;

use super::{
    CodeRecord, DatasetMetadataRecord, EventRecord, EventShard, LabelRecord, MedsDataset,
    SplitAssignment, Timestamp,
};

pub const DESCRIPTOR_PATH: &str = "metadata/dataset.json";
pub const CODES_PATH: &str = "metadata/codes.parquet";
pub const SPLITS_PATH: &str = "metadata/subject_splits.parquet";
pub const DATA_DIR: &str = "data";
pub const LABELS_DIR: &str = "labels";

const BATCH_SIZE: usize = 8192;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{}: dataset descriptor not found", .0.display())]
    MissingMetadata(PathBuf),
    #[error("{}: invalid dataset descriptor: {source}", path.display())]
    BadDescriptor {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}, row {row}: {message}", path.display())]
    ShardParse {
        path: PathBuf,
        row: usize,
        message: String,
    },
    #[error("{}: column `{column}`: {reason}", path.display())]
    SchemaMismatch {
        path: PathBuf,
        column: String,
        reason: String,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

/// Parse a complete MEDS root. Shards are read in parallel and kept in
/// lexicographic path order.
pub fn load_dataset(root: &Path) -> Result<MedsDataset, IngestError> {
    let mut ds = load_tables(root)?;
    let shard_paths = list_parquet(&root.join(DATA_DIR))?;
    ds.shards = shard_paths
        .into_par_iter()
        .map(|(name, path)| {
            let mut cursor = ShardCursor::open(name.clone(), path)?;
            let mut events = Vec::new();
            while let Some(batch) = cursor.next_batch()? {
                events.extend(batch);
            }
            Ok(EventShard { name, events })
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    Ok(ds)
}

/// Everything except the event shards: descriptor, codes, splits and labels.
pub fn load_tables(root: &Path) -> Result<MedsDataset, IngestError> {
    let metadata = read_descriptor(root)?;
    let codes_path = root.join(CODES_PATH);
    let codes = if codes_path.is_file() {
        read_table(&codes_path, decode_codes)?
    } else {
        Vec::new()
    };
    let splits_path = root.join(SPLITS_PATH);
    let splits = if splits_path.is_file() {
        read_table(&splits_path, decode_splits)?
    } else {
        Vec::new()
    };
    let mut labels = Vec::new();
    for (_, path) in list_parquet(&root.join(LABELS_DIR))? {
        labels.extend(read_table(&path, decode_labels)?);
    }
    Ok(MedsDataset {
        metadata,
        shards: Vec::new(),
        codes,
        splits,
        labels,
    })
}

/// Stream events shard by shard without materializing the dataset.
pub fn load_events_streaming(root: &Path) -> Result<EventStream, IngestError> {
    let descriptor = root.join(DESCRIPTOR_PATH);
    if !descriptor.is_file() {
        return Err(IngestError::MissingMetadata(descriptor));
    }
    Ok(EventStream {
        shards: list_parquet(&root.join(DATA_DIR))?.into_iter(),
        current: None,
        done: false,
    })
}

pub fn read_descriptor(root: &Path) -> Result<DatasetMetadataRecord, IngestError> {
    let path = root.join(DESCRIPTOR_PATH);
    let file = File::open(&path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => IngestError::MissingMetadata(path.clone()),
        _ => IngestError::Io {
            path: path.clone(),
            source: e,
        },
    })?;
    serde_json::from_reader(io::BufReader::new(file))
        .map_err(|source| IngestError::BadDescriptor { path, source })
}

/// `.parquet` files under `dir`, keyed by `/`-separated relative path and
/// sorted by it. A missing directory yields nothing.
fn list_parquet(dir: &Path) -> Result<Vec<(String, PathBuf)>, IngestError> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(dir) {
        let entry = entry.map_err(|e| IngestError::Io {
            path: dir.to_path_buf(),
            source: e.into(),
        })?;
        let path = entry.path();
        if entry.file_type().is_file() && path.extension().is_some_and(|x| x == "parquet") {
            let rel = path.strip_prefix(dir).expect("walkdir yields children of dir");
            let name = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            out.push((name, path.to_path_buf()));
        }
    }
    out.sort();
    Ok(out)
}

/// Lazy iterator over `(shard name, row index, event)` in deterministic order.
/// Stops after the first error.
pub struct EventStream {
    shards: std::vec::IntoIter<(String, PathBuf)>,
    current: Option<(ShardCursor, std::vec::IntoIter<EventRecord>, usize)>,
    done: bool,
}

impl Iterator for EventStream {
    type Item = Result<(String, usize, EventRecord), IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            if let Some((cursor, buffer, row)) = &mut self.current {
                if let Some(e) = buffer.next() {
                    let item = (cursor.name.clone(), *row, e);
                    *row += 1;
                    return Some(Ok(item));
                }
                match cursor.next_batch() {
                    Ok(Some(batch)) => *buffer = batch.into_iter(),
                    Ok(None) => self.current = None,
                    Err(e) => {
                        self.done = true;
                        return Some(Err(e));
                    }
                }
                continue;
            }
            let (name, path) = self.shards.next()?;
            match ShardCursor::open(name, path) {
                Ok(cursor) => self.current = Some((cursor, Vec::new().into_iter(), 0)),
                Err(e) => {
                    self.done = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

struct ShardCursor {
    name: String,
    path: PathBuf,
    reader: ParquetRecordBatchReader,
    rows_read: usize,
    /// Row error held back until the rows before it have been handed out.
    pending: Option<IngestError>,
}

impl ShardCursor {
    fn open(name: String, path: PathBuf) -> Result<Self, IngestError> {
        let reader = open_parquet(&path)?;
        let cursor = ShardCursor {
            name,
            path,
            reader,
            rows_read: 0,
            pending: None,
        };
        cursor.check_schema()?;
        Ok(cursor)
    }

    fn check_schema(&self) -> Result<(), IngestError> {
        const KNOWN: [&str; 5] = ["subject_id", "time", "code", "numeric_value", "text_value"];
        let schema = self.reader.schema();
        for required in ["subject_id", "code"] {
            if schema.field_with_name(required).is_err() {
                return Err(IngestError::SchemaMismatch {
                    path: self.path.clone(),
                    column: required.into(),
                    reason: "required column is missing".into(),
                });
            }
        }
        let extra: BTreeSet<_> = schema
            .fields()
            .iter()
            .map(|f| f.name().as_str())
            .filter(|n| !KNOWN.contains(n))
            .collect();
        if !extra.is_empty() {
            log::warn!(
                "{}: ignoring unknown columns {:?}",
                self.path.display(),
                extra
            );
        }
        Ok(())
    }

    fn next_batch(&mut self) -> Result<Option<Vec<EventRecord>>, IngestError> {
        if let Some(e) = self.pending.take() {
            return Err(e);
        }
        let Some(batch) = self.reader.next() else {
            return Ok(None);
        };
        let batch = batch.map_err(|e| IngestError::ShardParse {
            path: self.path.clone(),
            row: self.rows_read,
            message: e.to_string(),
        })?;
        let (events, err) = decode_events(&batch, &self.path, self.rows_read)?;
        self.rows_read += batch.num_rows();
        match err {
            Some(e) if events.is_empty() => Err(e),
            Some(e) => {
                self.pending = Some(e);
                Ok(Some(events))
            }
            None => Ok(Some(events)),
        }
    }
}

fn open_parquet(path: &Path) -> Result<ParquetRecordBatchReader, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |e: parquet::errors::ParquetError| IngestError::ShardParse {
        path: path.to_path_buf(),
        row: 0,
        message: e.to_string(),
    };
    ParquetRecordBatchReaderBuilder::try_new(file)
        .map_err(parse_err)?
        .with_batch_size(BATCH_SIZE)
        .build()
        .map_err(parse_err)
}

fn read_table<T>(
    path: &Path,
    decode: fn(&RecordBatch, &Path, usize) -> Result<Vec<T>, IngestError>,
) -> Result<Vec<T>, IngestError> {
    let reader = open_parquet(path)?;
    let mut out = Vec::new();
    let mut offset = 0;
    for batch in reader {
        let batch = batch.map_err(|e| IngestError::ShardParse {
            path: path.to_path_buf(),
            row: offset,
            message: e.to_string(),
        })?;
        out.extend(decode(&batch, path, offset)?);
        offset += batch.num_rows();
    }
    Ok(out)
}

/// Typed, nullable views of the columns of one record batch.
struct Columns<'a> {
    batch: &'a RecordBatch,
    path: &'a Path,
    offset: usize,
}

impl<'a> Columns<'a> {
    fn mismatch(&self, column: &str, reason: impl Into<String>) -> IngestError {
        IngestError::SchemaMismatch {
            path: self.path.to_path_buf(),
            column: column.into(),
            reason: reason.into(),
        }
    }

    fn row_err(&self, row: usize, message: impl Into<String>) -> IngestError {
        IngestError::ShardParse {
            path: self.path.to_path_buf(),
            row: self.offset + row,
            message: message.into(),
        }
    }

    fn raw(&self, name: &str, required: bool) -> Result<Option<&'a ArrayRef>, IngestError> {
        match self.batch.column_by_name(name) {
            Some(a) => Ok(Some(a)),
            None if required => Err(self.mismatch(name, "required column is missing")),
            None => Ok(None),
        }
    }

    fn cast(&self, name: &str, array: &ArrayRef, to: &DataType) -> Result<ArrayRef, IngestError> {
        cast(array, to).map_err(|e| {
            self.mismatch(name, format!("cannot read {} as {to}: {e}", array.data_type()))
        })
    }

    fn strings(&self, name: &str, required: bool) -> Result<Vec<Option<String>>, IngestError> {
        let Some(array) = self.raw(name, required)? else {
            return Ok(vec![None; self.batch.num_rows()]);
        };
        let array = self.cast(name, array, &DataType::Utf8)?;
        Ok(array
            .as_string::<i32>()
            .iter()
            .map(|v| v.map(str::to_string))
            .collect())
    }

    fn non_empty(&self, row: usize, name: &str, v: Option<String>) -> Result<String, IngestError> {
        match v {
            Some(s) if !s.is_empty() => Ok(s),
            Some(_) => Err(self.row_err(row, format!("empty `{name}`"))),
            None => Err(self.row_err(row, format!("null `{name}`"))),
        }
    }

    fn required_strings(&self, name: &str) -> Result<Vec<String>, IngestError> {
        self.strings(name, true)?
            .into_iter()
            .enumerate()
            .map(|(row, v)| self.non_empty(row, name, v))
            .collect()
    }

    fn doubles(&self, name: &str) -> Result<Vec<Option<f64>>, IngestError> {
        let Some(array) = self.raw(name, false)? else {
            return Ok(vec![None; self.batch.num_rows()]);
        };
        if !array.data_type().is_numeric() && !array.data_type().is_null() {
            return Err(self.mismatch(name, format!("expected a numeric column, found {}", array.data_type())));
        }
        let array = self.cast(name, array, &DataType::Float64)?;
        Ok(array.as_primitive::<Float64Type>().iter().collect())
    }

    fn integers(&self, name: &str) -> Result<Vec<Option<i64>>, IngestError> {
        let Some(array) = self.raw(name, false)? else {
            return Ok(vec![None; self.batch.num_rows()]);
        };
        if !array.data_type().is_integer() && !array.data_type().is_null() {
            return Err(self.mismatch(name, format!("expected an integer column, found {}", array.data_type())));
        }
        let array = self.cast(name, array, &DataType::Int64)?;
        Ok(array.as_primitive::<Int64Type>().iter().collect())
    }

    fn booleans(&self, name: &str) -> Result<Vec<Option<bool>>, IngestError> {
        let Some(array) = self.raw(name, false)? else {
            return Ok(vec![None; self.batch.num_rows()]);
        };
        let array = self.cast(name, array, &DataType::Boolean)?;
        Ok(array.as_boolean().iter().collect())
    }

    fn timestamps(&self, name: &str, required: bool) -> Result<Vec<Option<Timestamp>>, IngestError> {
        let Some(array) = self.raw(name, required)? else {
            return Ok(vec![None; self.batch.num_rows()]);
        };
        let values = match array.data_type() {
            DataType::Utf8 | DataType::LargeUtf8 | DataType::Utf8View => {
                let array = self.cast(name, array, &DataType::Utf8)?;
                array
                    .as_string::<i32>()
                    .iter()
                    .enumerate()
                    .map(|(row, v)| {
                        v.map(|s| Timestamp::parse(s).map_err(|e| self.row_err(row, e.to_string())))
                            .transpose()
                    })
                    .collect::<Result<_, _>>()?
            }
            // Keep the zone so the stored UTC instant is not shifted.
            DataType::Timestamp(_, tz) => self.micros(name, array, tz.clone())?,
            DataType::Date32 | DataType::Date64 | DataType::Null => self.micros(name, array, None)?,
            other => return Err(self.mismatch(name, format!("expected a timestamp column, found {other}"))),
        };
        if required {
            if let Some(row) = values.iter().position(Option::is_none) {
                return Err(self.row_err(row, format!("null `{name}`")));
            }
        }
        Ok(values)
    }

    fn micros(
        &self,
        name: &str,
        array: &ArrayRef,
        tz: Option<Arc<str>>,
    ) -> Result<Vec<Option<Timestamp>>, IngestError> {
        let array = self.cast(name, array, &DataType::Timestamp(TimeUnit::Microsecond, tz))?;
        Ok(array
            .as_primitive::<TimestampMicrosecondType>()
            .iter()
            .map(|v| v.map(Timestamp::from_micros))
            .collect())
    }

    fn string_lists(&self, name: &str) -> Result<Vec<Vec<String>>, IngestError> {
        let rows = self.batch.num_rows();
        let Some(array) = self.raw(name, false)? else {
            return Ok(vec![Vec::new(); rows]);
        };
        match array.data_type() {
            DataType::List(_) | DataType::LargeList(_) | DataType::Null => {}
            other => return Err(self.mismatch(name, format!("expected a list column, found {other}"))),
        }
        let target = DataType::List(Arc::new(Field::new_list_field(DataType::Utf8, true)));
        let array = self.cast(name, array, &target)?;
        let lists = array.as_list::<i32>();
        (0..rows)
            .map(|row| {
                if lists.is_null(row) {
                    return Ok(Vec::new());
                }
                let values = lists.value(row);
                values
                    .as_string::<i32>()
                    .iter()
                    .map(|v| v.map(str::to_string).ok_or_else(|| self.row_err(row, format!("null entry in `{name}`"))))
                    .collect()
            })
            .collect()
    }
}

/// Decoded rows up to the first bad one, plus that row's error. Column-level
/// problems fail the whole batch.
type Decoded = (Vec<EventRecord>, Option<IngestError>);

fn decode_events(batch: &RecordBatch, path: &Path, offset: usize) -> Result<Decoded, IngestError> {
    let cols = Columns { batch, path, offset };
    let subjects = cols.strings("subject_id", true)?;
    let codes = cols.strings("code", true)?;
    let times = cols.timestamps("time", false)?;
    let numerics = cols.doubles("numeric_value")?;
    let texts = cols.strings("text_value", false)?;
    let mut out = Vec::with_capacity(subjects.len());
    let rows = subjects.into_iter().zip(codes).zip(times).zip(numerics).zip(texts);
    for (row, ((((subject_id, code), time), numeric_value), text_value)) in rows.enumerate() {
        let (subject_id, code) = match (cols.non_empty(row, "subject_id", subject_id), cols.non_empty(row, "code", code)) {
            (Ok(s), Ok(c)) => (s, c),
            (Err(e), _) | (_, Err(e)) => return Ok((out, Some(e))),
        };
        out.push(EventRecord {
            subject_id,
            code,
            time,
            numeric_value,
            text_value,
        });
    }
    Ok((out, None))
}

fn decode_codes(batch: &RecordBatch, path: &Path, offset: usize) -> Result<Vec<CodeRecord>, IngestError> {
    let cols = Columns { batch, path, offset };
    let codes = cols.required_strings("code")?;
    let descriptions = cols.strings("description", false)?;
    let parents = cols.string_lists("parent_codes")?;
    Ok(codes
        .into_iter()
        .zip(descriptions)
        .zip(parents)
        .map(|((code, description), parent_codes)| CodeRecord {
            code,
            description,
            parent_codes,
        })
        .collect())
}

fn decode_splits(batch: &RecordBatch, path: &Path, offset: usize) -> Result<Vec<SplitAssignment>, IngestError> {
    let cols = Columns { batch, path, offset };
    let subjects = cols.required_strings("subject_id")?;
    let splits = cols.required_strings("split")?;
    Ok(subjects
        .into_iter()
        .zip(splits)
        .map(|(subject_id, split)| SplitAssignment { subject_id, split })
        .collect())
}

fn decode_labels(batch: &RecordBatch, path: &Path, offset: usize) -> Result<Vec<LabelRecord>, IngestError> {
    let cols = Columns { batch, path, offset };
    let subjects = cols.required_strings("subject_id")?;
    let times = cols.timestamps("prediction_time", true)?;
    let booleans = cols.booleans("boolean_value")?;
    let integers = cols.integers("integer_value")?;
    let floats = cols.doubles("float_value")?;
    let categoricals = cols.strings("categorical_value", false)?;
    Ok((0..subjects.len())
        .map(|i| LabelRecord {
            subject_id: subjects[i].clone(),
            prediction_time: times[i].expect("required column checked for nulls"),
            boolean_value: booleans[i],
            integer_value: integers[i],
            float_value: floats[i],
            categorical_value: categoricals[i].clone(),
        })
        .collect())
}
