//! In-memory MEDS tables and the on-disk reader/writer.
//!
//! A MEDS root is laid out as:
//!
//! ```text
//! data/**/*.parquet                 event shards (subject_id, time, code, numeric_value, text_value)
//! metadata/dataset.json             dataset descriptor
//! metadata/codes.parquet            optional (code, description, parent_codes)
//! metadata/subject_splits.parquet   optional (subject_id, split)
//! labels/**/*.parquet               optional (subject_id, prediction_time, *_value)
//! ```

mod ingest;
mod timestamp;
mod write;

use serde::{Deserialize, Deserializer, Serialize};

pub use ingest::{load_dataset, load_events_streaming, load_tables, read_descriptor, EventStream, IngestError};
pub use timestamp::{Timestamp, TimestampError};
pub use write::{write_dataset, WriteError};

/// One row of a MEDS data shard.
#[derive(Clone, Debug, PartialEq)]
pub struct EventRecord {
    pub subject_id: String,
    pub code: String,
    pub time: Option<Timestamp>,
    pub numeric_value: Option<f64>,
    pub text_value: Option<String>,
}

impl EventRecord {
    pub fn new(subject_id: impl Into<String>, code: impl Into<String>) -> Self {
        EventRecord {
            subject_id: subject_id.into(),
            code: code.into(),
            time: None,
            numeric_value: None,
            text_value: None,
        }
    }

    pub fn with_time(mut self, t: Timestamp) -> Self {
        self.time = Some(t);
        self
    }

    pub fn with_numeric(mut self, v: f64) -> Self {
        self.numeric_value = Some(v);
        self
    }

    pub fn with_text(mut self, v: impl Into<String>) -> Self {
        self.text_value = Some(v.into());
        self
    }

    /// Number of optional fields present (0..=3).
    pub fn optional_count(&self) -> usize {
        usize::from(self.time.is_some())
            + usize::from(self.numeric_value.is_some())
            + usize::from(self.text_value.is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeRecord {
    pub code: String,
    pub description: Option<String>,
    pub parent_codes: Vec<String>,
}

impl CodeRecord {
    pub fn new(code: impl Into<String>) -> Self {
        CodeRecord {
            code: code.into(),
            description: None,
            parent_codes: Vec::new(),
        }
    }

    pub fn with_description(mut self, d: impl Into<String>) -> Self {
        self.description = Some(d.into());
        self
    }

    pub fn with_parents<I, S>(mut self, parents: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.parent_codes = parents.into_iter().map(Into::into).collect();
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMetadataRecord {
    pub dataset_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_version: Option<String>,
    pub meds_version: String,
    pub created_at: Timestamp,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub license: Option<String>,
    #[serde(
        rename = "location_uri",
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub location_uris: Vec<String>,
    #[serde(
        rename = "description_uri",
        default,
        deserialize_with = "one_or_many",
        skip_serializing_if = "Vec::is_empty"
    )]
    pub description_uris: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etl_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etl_version: Option<String>,
}

impl DatasetMetadataRecord {
    pub fn new(name: impl Into<String>, meds_version: impl Into<String>, created_at: Timestamp) -> Self {
        DatasetMetadataRecord {
            dataset_name: name.into(),
            dataset_version: None,
            meds_version: meds_version.into(),
            created_at,
            license: None,
            location_uris: Vec::new(),
            description_uris: Vec::new(),
            etl_name: None,
            etl_version: None,
        }
    }
}

/// The MEDS descriptor allows a bare string, a list, or null for URI fields.
fn one_or_many<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        One(String),
        Many(Vec<String>),
    }
    Ok(match Option::<OneOrMany>::deserialize(d)? {
        None => Vec::new(),
        Some(OneOrMany::One(s)) => vec![s],
        Some(OneOrMany::Many(v)) => v,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitAssignment {
    pub subject_id: String,
    pub split: String,
}

impl SplitAssignment {
    pub fn new(subject_id: impl Into<String>, split: impl Into<String>) -> Self {
        SplitAssignment {
            subject_id: subject_id.into(),
            split: split.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LabelValue {
    Boolean(bool),
    Integer(i64),
    Float(f64),
    Categorical(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LabelValueError {
    #[error("label carries no value")]
    NoLabelValue,
    #[error("label carries {0} values, expected exactly one")]
    MultipleLabelValues(usize),
}

/// A label row as stored on disk: four nullable value columns, of which
/// exactly one is expected to be set. [`LabelRecord::value`] checks that.
#[derive(Clone, Debug, PartialEq)]
pub struct LabelRecord {
    pub subject_id: String,
    pub prediction_time: Timestamp,
    pub boolean_value: Option<bool>,
    pub integer_value: Option<i64>,
    pub float_value: Option<f64>,
    pub categorical_value: Option<String>,
}

impl LabelRecord {
    pub fn new(subject_id: impl Into<String>, prediction_time: Timestamp, value: LabelValue) -> Self {
        let mut l = LabelRecord {
            subject_id: subject_id.into(),
            prediction_time,
            boolean_value: None,
            integer_value: None,
            float_value: None,
            categorical_value: None,
        };
        match value {
            LabelValue::Boolean(v) => l.boolean_value = Some(v),
            LabelValue::Integer(v) => l.integer_value = Some(v),
            LabelValue::Float(v) => l.float_value = Some(v),
            LabelValue::Categorical(v) => l.categorical_value = Some(v),
        }
        l
    }

    pub fn values(&self) -> Vec<LabelValue> {
        let mut out = Vec::new();
        out.extend(self.boolean_value.map(LabelValue::Boolean));
        out.extend(self.integer_value.map(LabelValue::Integer));
        out.extend(self.float_value.map(LabelValue::Float));
        out.extend(self.categorical_value.clone().map(LabelValue::Categorical));
        out
    }

    pub fn value(&self) -> Result<LabelValue, LabelValueError> {
        let mut values = self.values();
        match values.len() {
            0 => Err(LabelValueError::NoLabelValue),
            1 => Ok(values.pop().unwrap()),
            n => Err(LabelValueError::MultipleLabelValues(n)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EventShard {
    /// Path relative to `data/`, with `/` separators.
    pub name: String,
    pub events: Vec<EventRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MedsDataset {
    pub metadata: DatasetMetadataRecord,
    pub shards: Vec<EventShard>,
    pub codes: Vec<CodeRecord>,
    pub splits: Vec<SplitAssignment>,
    pub labels: Vec<LabelRecord>,
}

impl MedsDataset {
    pub fn new(metadata: DatasetMetadataRecord) -> Self {
        MedsDataset {
            metadata,
            shards: Vec::new(),
            codes: Vec::new(),
            splits: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// All events in shard order, with their (shard name, row index) coordinates.
    pub fn events(&self) -> impl Iterator<Item = (&str, usize, &EventRecord)> + '_ {
        self.shards.iter().flat_map(|shard| {
            shard
                .events
                .iter()
                .enumerate()
                .map(move |(row, e)| (shard.name.as_str(), row, e))
        })
    }

    pub fn event_count(&self) -> usize {
        self.shards.iter().map(|s| s.events.len()).sum()
    }
}
