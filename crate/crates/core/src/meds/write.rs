use std::fs::{self, File};
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use arrow_array::builder::{ListBuilder, StringBuilder};
use arrow_array::{
    Array, ArrayRef, BooleanArray, Float64Array, Int64Array, RecordBatch, StringArray,
    TimestampMicrosecondArray,
};
use arrow_schema::{ArrowError, DataType, Field, Schema, TimeUnit};
use parquet::arrow::ArrowWriter;
use parquet::errors::ParquetError;

use super::ingest::{CODES_PATH, DATA_DIR, DESCRIPTOR_PATH, LABELS_DIR, SPLITS_PATH};
use super::{CodeRecord, EventRecord, LabelRecord, MedsDataset, SplitAssignment};

#[derive(Debug, thiserror::Error)]
pub enum WriteError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parquet { path: PathBuf, source: ParquetError },
    #[error(transparent)]
    Arrow(#[from] ArrowError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Write a dataset in the layout [`super::load_dataset`] reads.
pub fn write_dataset(ds: &MedsDataset, root: &Path) -> Result<(), WriteError> {
    let descriptor = root.join(DESCRIPTOR_PATH);
    create_parent(&descriptor)?;
    let json = serde_json::to_vec_pretty(&ds.metadata)?;
    fs::write(&descriptor, json).map_err(|source| WriteError::Io {
        path: descriptor,
        source,
    })?;

    for shard in &ds.shards {
        write_batch(&root.join(DATA_DIR).join(&shard.name), events_batch(&shard.events)?)?;
    }
    if !ds.codes.is_empty() {
        write_batch(&root.join(CODES_PATH), codes_batch(&ds.codes)?)?;
    }
    if !ds.splits.is_empty() {
        write_batch(&root.join(SPLITS_PATH), splits_batch(&ds.splits)?)?;
    }
    if !ds.labels.is_empty() {
        write_batch(&root.join(LABELS_DIR).join("labels.parquet"), labels_batch(&ds.labels)?)?;
    }
    Ok(())
}

fn create_parent(path: &Path) -> Result<(), WriteError> {
    let dir = path.parent().expect("table paths have a parent");
    fs::create_dir_all(dir).map_err(|source| WriteError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub(crate) fn write_batch(path: &Path, batch: RecordBatch) -> Result<(), WriteError> {
    create_parent(path)?;
    let pq = |source| WriteError::Parquet {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(|source| WriteError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut writer = ArrowWriter::try_new(file, batch.schema(), None).map_err(pq)?;
    writer.write(&batch).map_err(pq)?;
    writer.close().map_err(pq)?;
    Ok(())
}

fn batch(fields: Vec<Field>, columns: Vec<ArrayRef>) -> Result<RecordBatch, ArrowError> {
    RecordBatch::try_new(Arc::new(Schema::new(fields)), columns)
}

fn timestamp_type() -> DataType {
    DataType::Timestamp(TimeUnit::Microsecond, None)
}

fn events_batch(events: &[EventRecord]) -> Result<RecordBatch, ArrowError> {
    batch(
        vec![
            Field::new("subject_id", DataType::Utf8, false),
            Field::new("time", timestamp_type(), true),
            Field::new("code", DataType::Utf8, false),
            Field::new("numeric_value", DataType::Float64, true),
            Field::new("text_value", DataType::Utf8, true),
        ],
        vec![
            Arc::new(StringArray::from_iter_values(events.iter().map(|e| &e.subject_id))),
            Arc::new(TimestampMicrosecondArray::from_iter(
                events.iter().map(|e| e.time.map(|t| t.as_micros())),
            )),
            Arc::new(StringArray::from_iter_values(events.iter().map(|e| &e.code))),
            Arc::new(Float64Array::from_iter(events.iter().map(|e| e.numeric_value))),
            Arc::new(StringArray::from_iter(events.iter().map(|e| e.text_value.as_deref()))),
        ],
    )
}

fn codes_batch(codes: &[CodeRecord]) -> Result<RecordBatch, ArrowError> {
    let mut parents = ListBuilder::new(StringBuilder::new());
    for c in codes {
        for p in &c.parent_codes {
            parents.values().append_value(p);
        }
        parents.append(true);
    }
    let parents = parents.finish();
    let parent_field = Field::new("parent_codes", parents.data_type().clone(), true);
    batch(
        vec![
            Field::new("code", DataType::Utf8, false),
            Field::new("description", DataType::Utf8, true),
            parent_field,
        ],
        vec![
            Arc::new(StringArray::from_iter_values(codes.iter().map(|c| &c.code))),
            Arc::new(StringArray::from_iter(codes.iter().map(|c| c.description.as_deref()))),
            Arc::new(parents),
        ],
    )
}

fn splits_batch(splits: &[SplitAssignment]) -> Result<RecordBatch, ArrowError> {
    batch(
        vec![
            Field::new("subject_id", DataType::Utf8, false),
            Field::new("split", DataType::Utf8, false),
        ],
        vec![
            Arc::new(StringArray::from_iter_values(splits.iter().map(|s| &s.subject_id))),
            Arc::new(StringArray::from_iter_values(splits.iter().map(|s| &s.split))),
        ],
    )
}

fn labels_batch(labels: &[LabelRecord]) -> Result<RecordBatch, ArrowError> {
    batch(
        vec![
            Field::new("subject_id", DataType::Utf8, false),
            Field::new("prediction_time", timestamp_type(), false),
            Field::new("boolean_value", DataType::Boolean, true),
            Field::new("integer_value", DataType::Int64, true),
            Field::new("float_value", DataType::Float64, true),
            Field::new("categorical_value", DataType::Utf8, true),
        ],
        vec![
            Arc::new(StringArray::from_iter_values(labels.iter().map(|l| &l.subject_id))),
            Arc::new(TimestampMicrosecondArray::from_iter_values(
                labels.iter().map(|l| l.prediction_time.as_micros()),
            )),
            Arc::new(BooleanArray::from_iter(labels.iter().map(|l| l.boolean_value))),
            Arc::new(Int64Array::from_iter(labels.iter().map(|l| l.integer_value))),
            Arc::new(Float64Array::from_iter(labels.iter().map(|l| l.float_value))),
            Arc::new(StringArray::from_iter(labels.iter().map(|l| l.categorical_value.as_deref()))),
        ],
    )
}
