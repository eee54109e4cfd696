mod common;

use std::fs::{self, File};
use std::path::Path;
use std::sync::Arc;

use arrow_array::{ArrayRef, Float64Array, Int64Array, RecordBatch, StringArray};
use meds_graph::meds::{
    load_dataset, load_events_streaming, write_dataset, CodeRecord, DatasetMetadataRecord, EventRecord,
    EventShard, IngestError, LabelRecord, LabelValue, MedsDataset,
};
use parquet::arrow::ArrowWriter;

use common::{small_fixture, ts};

fn write_parquet(path: &Path, columns: Vec<(&str, ArrayRef)>) {
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    let batch = RecordBatch::try_from_iter(columns).unwrap();
    let mut w = ArrowWriter::try_new(File::create(path).unwrap(), batch.schema(), None).unwrap();
    w.write(&batch).unwrap();
    w.close().unwrap();
}

fn strings(v: &[Option<&str>]) -> ArrayRef {
    Arc::new(StringArray::from(v.to_vec()))
}

fn descriptor(root: &Path) {
    fs::create_dir_all(root.join("metadata")).unwrap();
    fs::write(
        root.join("metadata/dataset.json"),
        r#"{"dataset_name": "raw", "meds_version": "0.3.3", "created_at": "2025-01-01T00:00:00"}"#,
    )
    .unwrap();
}

#[test]
fn one_shard_three_events_two_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut ds = small_fixture();
    ds.codes.push(CodeRecord::new("B").with_parents(["A"]));
    write_dataset(&ds, dir.path()).unwrap();
    let back = load_dataset(dir.path()).unwrap();
    assert_eq!(back.event_count(), 3);
    assert_eq!(back.codes.len(), 2);
    assert!(back.labels.is_empty());
    assert_eq!(back, ds);
}

#[test]
fn full_roundtrip_through_parquet() {
    let dir = tempfile::tempdir().unwrap();
    let mut m = DatasetMetadataRecord::new("full", "0.3.3", ts("2025-02-03T04:05:06.789Z"));
    m.dataset_version = Some("2".into());
    m.license = Some("CC-BY-4.0".into());
    m.location_uris = vec!["https://a.example/x".into(), "https://a.example/y".into()];
    m.description_uris = vec!["https://a.example/doc".into()];
    m.etl_name = Some("MEDS-extract".into());
    m.etl_version = Some("0.1".into());
    let mut ds = MedsDataset::new(m);
    ds.shards = vec![
        EventShard {
            name: "held_out/0.parquet".into(),
            events: vec![EventRecord::new("9", "X").with_text("quote \" and\nnewline")],
        },
        EventShard {
            name: "train/0.parquet".into(),
            events: vec![
                EventRecord::new("1", "Y").with_time(ts("1999-12-31T23:59:59.000001Z")).with_numeric(-0.0),
                EventRecord::new("1", "Y").with_time(ts("2000-01-01T00:00:00Z")).with_numeric(1e300),
            ],
        },
    ];
    ds.labels = vec![
        LabelRecord::new("1", ts("2000-01-02"), LabelValue::Boolean(true)),
        LabelRecord::new("9", ts("2000-01-02"), LabelValue::Integer(-3)),
        LabelRecord::new("9", ts("2000-01-03"), LabelValue::Float(0.25)),
        LabelRecord::new("9", ts("2000-01-04"), LabelValue::Categorical("home".into())),
    ];
    write_dataset(&ds, dir.path()).unwrap();
    let back = load_dataset(dir.path()).unwrap();
    assert_eq!(back, ds);
    assert!(back.shards[1].events[0].numeric_value.unwrap().is_sign_negative());
    // Loading twice gives identical values.
    assert_eq!(load_dataset(dir.path()).unwrap(), back);
}

#[test]
fn streaming_matches_load_order() {
    let dir = tempfile::tempdir().unwrap();
    let mut ds = MedsDataset::new(DatasetMetadataRecord::new("s", "0.3.3", ts("2025-01-01")));
    ds.shards = vec![
        EventShard { name: "0.parquet".into(), events: vec![EventRecord::new("1", "A"), EventRecord::new("1", "B")] },
        EventShard { name: "1.parquet".into(), events: vec![EventRecord::new("2", "C")] },
    ];
    write_dataset(&ds, dir.path()).unwrap();
    let streamed: Vec<_> = load_events_streaming(dir.path()).unwrap().map(Result::unwrap).collect();
    let idx: Vec<_> = streamed.iter().map(|(s, r, _)| (s.as_str(), *r)).collect();
    assert_eq!(idx, vec![("0.parquet", 0), ("0.parquet", 1), ("1.parquet", 0)]);
    let loaded = load_dataset(dir.path()).unwrap();
    let from_load: Vec<_> = loaded.events().map(|(s, r, e)| (s.to_string(), r, e.clone())).collect();
    assert_eq!(streamed, from_load);
}

#[test]
fn streaming_equals_load_on_synth_shards() {
    use meds_graph::synth::{generate, SynthConfig};
    let dir = tempfile::tempdir().unwrap();
    let ds = generate(&SynthConfig { n_shards: 4, n_subjects: 300, ..Default::default() }).unwrap();
    write_dataset(&ds, dir.path()).unwrap();
    let streamed: Vec<_> = load_events_streaming(dir.path()).unwrap().map(Result::unwrap).collect();
    let loaded = load_dataset(dir.path()).unwrap();
    assert_eq!(streamed.len(), loaded.event_count());
    assert!(streamed.iter().zip(loaded.events()).all(|((s, r, e), (s2, r2, e2))| s == s2 && *r == r2 && e == e2));
    assert_eq!(loaded, ds);
}

#[test]
fn empty_data_dir_streams_nothing() {
    let dir = tempfile::tempdir().unwrap();
    descriptor(dir.path());
    fs::create_dir_all(dir.path().join("data")).unwrap();
    assert_eq!(load_events_streaming(dir.path()).unwrap().count(), 0);
}

#[test]
fn missing_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_dataset(dir.path()), Err(IngestError::MissingMetadata(_))));
    assert!(matches!(load_events_streaming(dir.path()), Err(IngestError::MissingMetadata(_))));
}

#[test]
fn malformed_descriptor() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("metadata")).unwrap();
    fs::write(dir.path().join("metadata/dataset.json"), r#"{"dataset_name": "x"}"#).unwrap();
    assert!(matches!(load_dataset(dir.path()), Err(IngestError::BadDescriptor { .. })));
}

#[test]
fn missing_code_column_is_schema_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    descriptor(dir.path());
    write_parquet(&dir.path().join("data/0.parquet"), vec![("subject_id", strings(&[Some("1")]))]);
    match load_dataset(dir.path()) {
        Err(IngestError::SchemaMismatch { column, .. }) => assert_eq!(column, "code"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_numeric_type_is_schema_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    descriptor(dir.path());
    write_parquet(
        &dir.path().join("data/0.parquet"),
        vec![
            ("subject_id", strings(&[Some("1")])),
            ("code", strings(&[Some("A")])),
            ("numeric_value", strings(&[Some("high")])),
        ],
    );
    match load_dataset(dir.path()) {
        Err(IngestError::SchemaMismatch { column, .. }) => assert_eq!(column, "numeric_value"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn null_code_names_shard_and_row() {
    let dir = tempfile::tempdir().unwrap();
    descriptor(dir.path());
    write_parquet(
        &dir.path().join("data/a/0.parquet"),
        vec![("subject_id", strings(&[Some("1"), Some("1")])), ("code", strings(&[Some("A"), None]))],
    );
    match load_dataset(dir.path()) {
        Err(IngestError::ShardParse { path, row, .. }) => {
            assert!(path.ends_with("a/0.parquet"));
            assert_eq!(row, 1);
        }
        other => panic!("{other:?}"),
    }
    // The stream yields the good row, then the error, then stops.
    let items: Vec<_> = load_events_streaming(dir.path()).unwrap().collect();
    assert_eq!(items.len(), 2);
    assert!(items[0].is_ok() && items[1].is_err());
}

#[test]
fn integer_subject_ids_and_extra_columns() {
    let dir = tempfile::tempdir().unwrap();
    descriptor(dir.path());
    write_parquet(
        &dir.path().join("data/0.parquet"),
        vec![
            ("subject_id", Arc::new(Int64Array::from(vec![10, 11])) as ArrayRef),
            ("code", strings(&[Some("A"), Some("B")])),
            ("numeric_value", Arc::new(Float64Array::from(vec![Some(1.5), None])) as ArrayRef),
            ("unit", strings(&[Some("mg"), None])),
        ],
    );
    let ds = load_dataset(dir.path()).unwrap();
    let ev: Vec<_> = ds.events().map(|(_, _, e)| e.clone()).collect();
    assert_eq!(ev, vec![EventRecord::new("10", "A").with_numeric(1.5), EventRecord::new("11", "B")]);
}

#[test]
fn descriptor_accepts_scalar_or_list_uris() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("metadata")).unwrap();
    fs::write(
        dir.path().join("metadata/dataset.json"),
        r#"{"dataset_name": "d", "meds_version": "0.3.3", "created_at": "2025-01-01T00:00:00Z",
            "location_uri": "https://x.example/a", "description_uri": ["https://x.example/b"], "license": null}"#,
    )
    .unwrap();
    let m = meds_graph::meds::read_descriptor(dir.path()).unwrap();
    assert_eq!(m.location_uris, vec!["https://x.example/a"]);
    assert_eq!(m.description_uris, vec!["https://x.example/b"]);
    assert_eq!(m.license, None);
}
