#![allow(dead_code)]

use std::collections::BTreeSet;

use meds_graph::meds::{
    CodeRecord, DatasetMetadataRecord, EventRecord, EventShard, MedsDataset, SplitAssignment, Timestamp,
};

pub fn ts(s: &str) -> Timestamp {
    Timestamp::parse(s).unwrap()
}

/// Three events, two subjects, two codes (one only referenced by an event),
/// one split assignment, bare metadata.
pub fn small_fixture() -> MedsDataset {
    let mut ds = MedsDataset::new(DatasetMetadataRecord::new("fx", "0.3.3", ts("2025-01-01T00:00:00Z")));
    ds.shards.push(EventShard {
        name: "0.parquet".into(),
        events: vec![
            EventRecord::new("1", "A").with_time(ts("2020-01-01T10:00:00Z")),
            EventRecord::new("1", "B").with_numeric(2.5),
            EventRecord::new("2", "A"),
        ],
    });
    ds.codes.push(CodeRecord::new("A").with_description("a"));
    ds.splits.push(SplitAssignment::new("1", "train"));
    ds
}

/// Node inventory counted straight from the input records.
pub fn node_inventory(ds: &MedsDataset) -> usize {
    let mut subjects = BTreeSet::new();
    let mut codes = BTreeSet::new();
    for (_, _, e) in ds.events() {
        subjects.insert(e.subject_id.as_str());
        codes.insert(e.code.as_str());
    }
    for s in &ds.splits {
        subjects.insert(s.subject_id.as_str());
    }
    for l in &ds.labels {
        subjects.insert(l.subject_id.as_str());
    }
    for c in &ds.codes {
        codes.insert(c.code.as_str());
        codes.extend(c.parent_codes.iter().map(String::as_str));
    }
    let split_names: BTreeSet<_> = ds.splits.iter().map(|s| s.split.as_str()).collect();
    let m = &ds.metadata;
    ds.event_count()
        + subjects.len()
        + codes.len()
        + 1
        + split_names.len()
        + usize::from(m.etl_name.is_some())
        + ds.labels.len()
        + m.location_uris.len()
        + usize::from(m.license.is_some())
}

/// Triple count from the per-record formulas. Assumes one code-table row
/// per code and no duplicate rows, which holds for synth output.
pub fn expected_triples(ds: &MedsDataset, provenance: bool) -> usize {
    let events: usize = ds.events().map(|(_, _, e)| 4 + e.optional_count() + usize::from(provenance)).sum();

    let mut subjects = BTreeSet::new();
    let mut codes = BTreeSet::new();
    for (_, _, e) in ds.events() {
        subjects.insert(&e.subject_id);
        codes.insert(&e.code);
    }
    subjects.extend(ds.splits.iter().map(|s| &s.subject_id));
    subjects.extend(ds.labels.iter().map(|l| &l.subject_id));
    let mut code_extra = 0;
    for c in &ds.codes {
        codes.insert(&c.code);
        codes.extend(c.parent_codes.iter());
        code_extra += usize::from(c.description.is_some()) + c.parent_codes.len();
    }

    let m = &ds.metadata;
    let meta = 4
        + usize::from(m.dataset_version.is_some())
        + 2 * usize::from(m.license.is_some())
        + 2 * m.location_uris.len()
        + m.description_uris.len()
        + m.etl_name.as_ref().map_or(0, |_| 3 + usize::from(m.etl_version.is_some()));

    let split_names: BTreeSet<_> = ds.splits.iter().map(|s| &s.split).collect();
    let labels: usize = ds.labels.iter().map(|l| 3 + l.values().len()).sum();

    events + 2 * subjects.len() + 2 * codes.len() + code_extra + meta + split_names.len() + ds.splits.len() + labels
}
